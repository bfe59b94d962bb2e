#include "winr/config_io.hpp"

#include <fstream>

#include "json.hpp"

namespace winr {

TrainConfig load_train_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad config '" + path.string() + "': " + e.what());
    }
    TrainConfig c;
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    if (j.contains("optimizer")) {
        const auto s = j.at("optimizer").get<std::string>();
        if (s == "adam")
            c.optimizer = OptimizerKind::Adam;
        else if (s == "sgd")
            c.optimizer = OptimizerKind::Sgd;
        else
            throw ParseError("config optimizer must be 'adam' or 'sgd', got '" + s + "'");
    }
    c.adam.beta1 = j.value("beta1", c.adam.beta1);
    c.adam.beta2 = j.value("beta2", c.adam.beta2);
    c.adam.eps = j.value("eps", c.adam.eps);
    c.seed = j.value("seed", c.seed);
    c.omega0 = j.value("omega0", c.omega0);
    c.loss_report_stride = j.value("loss_report_stride", c.loss_report_stride);
    c.divergence_factor = j.value("divergence_factor", c.divergence_factor);
    c.validate();
    return c;
}

void save_train_config(const TrainConfig& c, const std::filesystem::path& path) {
    nlohmann::json j{
        {"learning_rate", c.learning_rate},
        {"epochs", c.epochs},
        {"batch_size", c.batch_size},
        {"optimizer", c.optimizer == OptimizerKind::Adam ? "adam" : "sgd"},
        {"beta1", c.adam.beta1},
        {"beta2", c.adam.beta2},
        {"eps", c.adam.eps},
        {"seed", c.seed},
        {"omega0", c.omega0},
        {"loss_report_stride", c.loss_report_stride},
        {"divergence_factor", c.divergence_factor},
    };
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write config '" + path.string() + "'");
    out << j.dump(2) << "\n";
}

}  // namespace winr
