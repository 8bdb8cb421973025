#include <CLI11.hpp>
#include <optional>
#include <string>

#include "spinbath/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"spinbath: noisy two-level-system simulation and spectral analysis"};
    app.footer("experiments: simulate haar-test relaxation spectrum gap-study fpt avg-compare brackets");

    std::string experiment;
    app.add_option("experiment", experiment, "experiment to run")->required();

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file");

    std::optional<double> gamma, kappa, sigma, dt, t_final, y_level, kappa_sigma;
    std::optional<std::uint64_t> seed;
    std::optional<int> n_paths;
    std::optional<std::size_t> stride;
    std::optional<std::string> out_dir;
    app.add_option("--gamma", gamma, "noise decay rate");
    app.add_option("--kappa", kappa, "coupling strength");
    app.add_option("--sigma", sigma, "noise intensity");
    app.add_option("--dt", dt, "integration step");
    app.add_option("--t-final", t_final, "time horizon");
    app.add_option("--y-level", y_level, "first-passage level");
    app.add_option("--kappa-sigma", kappa_sigma, "kappa*sigma for gap studies");
    app.add_option("--seed", seed, "master RNG seed");
    app.add_option("--n-paths", n_paths, "ensemble size");
    app.add_option("--stride", stride, "output stride");
    app.add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    spinbath::harness::ExperimentConfig config;
    if (!config_path.empty()) {
        try {
            config = spinbath::harness::load_config(config_path);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        }
    }
    config.experiment = experiment;
    if (gamma) config.gamma = *gamma;
    if (kappa) config.kappa = *kappa;
    if (sigma) config.sigma = *sigma;
    if (dt) config.dt = *dt;
    if (t_final) config.t_final = *t_final;
    if (y_level) config.y_level = *y_level;
    if (kappa_sigma) config.kappa_sigma = *kappa_sigma;
    if (seed) config.seed = *seed;
    if (n_paths) config.n_paths = *n_paths;
    if (stride) config.output_stride = *stride;
    if (out_dir) config.out_dir = *out_dir;

    return spinbath::harness::run(config);
}
