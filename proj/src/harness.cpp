#include "spinbath/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>

#include "spinbath/averaging.hpp"
#include "spinbath/csv.hpp"
#include "spinbath/dynamics.hpp"
#include "spinbath/fpt.hpp"
#include "spinbath/parallel.hpp"
#include "spinbath/rng.hpp"
#include "spinbath/stats.hpp"

namespace spinbath::harness {

using nlohmann::json;

namespace {

const std::vector<std::string> known_experiments = {
    "simulate", "haar-test", "relaxation", "spectrum", "gap-study", "fpt", "avg-compare",
    "brackets"};

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["gamma"] = c.gamma;
    j["kappa"] = c.kappa;
    j["sigma"] = c.sigma;
    j["dt"] = c.dt;
    j["t_final"] = c.t_final;
    j["output_stride"] = c.output_stride;
    j["n_paths"] = c.n_paths;
    j["seed"] = c.seed.value();
    j["y_level"] = c.y_level;
    j["kappa_sigma"] = c.kappa_sigma;
    j["gamma_list"] = c.gamma_list;
    j["rescale_factor"] = c.rescale_factor;
    j["t_compare"] = c.t_compare;
    j["n_points"] = c.n_points;
    j["fd_step"] = c.fd_step;
    j["galerkin"] = {{"n_max", c.galerkin.n_max},
                     {"p_max", c.galerkin.p_max},
                     {"k_max", c.galerkin.k_max},
                     {"r", c.galerkin.r},
                     {"quad_points", c.galerkin.quad_points}};
    j["out"] = c.out_dir;
    return j;
}

struct Assertion {
    std::string name;
    double value;
    double threshold;
    bool pass;
};

class Summary {
  public:
    explicit Summary(const ExperimentConfig& c) { j_["config"] = config_to_json(c); }

    template <typename T>
    void result(const std::string& key, const T& value) {
        j_["results"][key] = value;
    }

    void require_below(const std::string& name, double value, double threshold) {
        record(name, value, threshold, value < threshold);
    }
    void require_above(const std::string& name, double value, double threshold) {
        record(name, value, threshold, value > threshold);
    }
    void require_in(const std::string& name, double value, double lo, double hi) {
        json a = {{"name", name}, {"value", value}, {"low", lo}, {"high", hi},
                  {"pass", value >= lo && value <= hi}};
        all_pass_ = all_pass_ && (value >= lo && value <= hi);
        j_["assertions"].push_back(a);
    }

    void write(const std::filesystem::path& dir, const std::string& experiment) {
        j_["pass"] = all_pass_;
        std::string name = experiment;
        std::replace(name.begin(), name.end(), '-', '_');
        std::ofstream out(dir / (name + "_summary.json"));
        out << j_.dump(2) << '\n';
    }

    bool all_pass() const { return all_pass_; }

  private:
    void record(const std::string& name, double value, double threshold, bool pass) {
        j_["assertions"].push_back(
            {{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", pass}});
        all_pass_ = all_pass_ && pass;
    }

    json j_;
    bool all_pass_ = true;
};

dynamics::SimParams sim_params(const ExperimentConfig& c) {
    dynamics::SimParams p;
    p.noise = {c.gamma, c.sigma};
    p.kappa = c.kappa;
    p.dt = c.dt;
    p.t_final = c.t_final;
    p.seed = c.seed.value();
    p.output_stride = c.output_stride;
    return p;
}

void write_trajectory_csv(const std::filesystem::path& path, const dynamics::Trajectory& tr) {
    csv::Writer w(path.string());
    w.header({"t", "Z", "x1", "x2", "x3", "x4", "chi", "phi", "psi", "rho"});
    for (std::size_t i = 0; i < tr.size(); ++i)
        w.row({tr.times[i], tr.z[i], tr.x1[i], tr.x2[i], tr.x3[i], tr.x4[i], tr.chi[i], tr.phi[i],
               tr.psi[i], tr.rho[i]});
}

// --- experiments ---------------------------------------------------------

void run_simulate(const ExperimentConfig& c, const std::filesystem::path& dir, Summary& s) {
    const auto params = sim_params(c);
    std::vector<double> final_rho(c.n_paths);
    for (int i = 0; i < c.n_paths; ++i) {
        auto rng = rng::derive_stream(params.seed, i);
        const auto tr = dynamics::simulate(params, su2::QuaternionState{}, rng);
        write_trajectory_csv(dir / ("traj_" + std::to_string(i) + ".csv"), tr);
        final_rho[i] = tr.rho.back();
    }
    const auto sum = stats::summarize(final_rho);
    s.result("n_paths", c.n_paths);
    s.result("final_rho_mean", sum.mean);
}

void run_haar_test(const ExperimentConfig& c, const std::filesystem::path& dir, Summary& s) {
    const auto params = sim_params(c);
    std::vector<double> rho_T(c.n_paths);
    parallel::parallel_for(c.n_paths, [&](std::size_t i) {
        auto rng = rng::derive_stream(params.seed, i);
        const auto q0 = su2::angles_to_quaternion(su2::haar_sample(rng));
        dynamics::SimParams p = params;
        p.output_stride = static_cast<std::size_t>(std::llround(p.t_final / p.dt));
        const auto tr = dynamics::simulate(p, q0, rng);
        rho_T[i] = tr.rho.back();
    });
    csv::Writer w((dir / "rho_samples.csv").string());
    w.header({"path", "rho_T"});
    for (int i = 0; i < c.n_paths; ++i) w.row({static_cast<double>(i), rho_T[i]});

    const auto ks = stats::ks_uniform(rho_T);
    const auto sum = stats::summarize(rho_T);
    s.result("ks_statistic", ks.statistic);
    s.result("ks_p_value", ks.p_value);
    s.result("mean_rho", sum.mean);
    s.require_above("haar_ks_p_value", ks.p_value, 0.01);
    s.require_in("haar_mean_rho", sum.mean, 0.48, 0.52);
}

void run_relaxation(const ExperimentConfig& c, const std::filesystem::path& dir, Summary& s) {
    const auto params = sim_params(c);
    std::vector<std::vector<double>> rho(c.n_paths);
    parallel::parallel_for(c.n_paths, [&](std::size_t i) {
        auto rng = rng::derive_stream(params.seed, i);
        rho[i] = dynamics::simulate(params, su2::QuaternionState{}, rng).rho;
    });
    const std::size_t n_t = rho[0].size();
    std::vector<double> times(n_t), means(n_t, 0.0);
    {
        auto rng = rng::derive_stream(params.seed, 0);
        times = dynamics::simulate(params, su2::QuaternionState{}, rng).times;
    }
    for (const auto& r : rho)
        for (std::size_t t = 0; t < n_t; ++t) means[t] += r[t];
    for (auto& m : means) m /= c.n_paths;

    csv::Writer w((dir / "relaxation.csv").string());
    w.header({"t", "mean_rho"});
    for (std::size_t t = 0; t < n_t; ++t) w.row({times[t], means[t]});

    const auto fit = stats::relaxation_fit(times, means);
    const averaging::EffectiveParams eff(c.gamma, c.kappa, c.sigma);
    s.result("fit_success", fit.success);
    s.result("rate", fit.rate);
    s.result("amplitude", fit.amplitude);
    s.result("r_squared", fit.r_squared);
    s.result("tstar", eff.tstar);
    s.result("rate_times_tstar", fit.rate * eff.tstar);
    s.require_in("relaxation_rate_times_tstar", fit.rate * eff.tstar, 0.05, 20.0);
    s.require_above("relaxation_r_squared", fit.r_squared, 0.9);
}

void run_spectrum(const ExperimentConfig& c, const std::filesystem::path& dir, Summary& s) {
    const auto res = spectral::compute_spectrum(c.galerkin, c.gamma, c.kappa, c.sigma);
    csv::Writer w((dir / "spectrum.csv").string());
    w.header({"re", "im"});
    for (const auto& ev : res.eigenvalues) w.row({ev.real(), ev.imag()});
    s.result("dim", c.galerkin.dim());
    s.result("gap", res.gap);
    s.result("zero_mode_error", res.zero_mode_error);
    s.result("im_cut", res.im_cut);
    s.require_below("zero_mode_error", res.zero_mode_error, 1e-8);
    s.require_below("max_real_part", res.eigenvalues.front().real(), 1e-8);
}

void run_gap_study(const ExperimentConfig& c, const std::filesystem::path& dir, Summary& s) {
    const auto rows = spectral::gap_scaling_study(c.gamma_list, c.kappa_sigma, c.galerkin);
    csv::Writer w((dir / "gap_study.csv").string());
    w.header({"gamma", "kappa_sigma", "gap", "tstar", "gap_times_tstar"});
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : rows) {
        w.row({r.gamma, r.kappa_sigma, r.gap, r.tstar, r.gap_times_tstar});
        lo = std::min(lo, r.gap_times_tstar);
        hi = std::max(hi, r.gap_times_tstar);
    }
    s.result("band_low", lo);
    s.result("band_high", hi);
    s.result("band_ratio", hi / lo);
    s.require_below("gap_band_ratio", hi / lo, 4.0);
}

void run_fpt(const ExperimentConfig& c, const std::filesystem::path& dir, Summary& s) {
    const auto params = sim_params(c);
    const auto res = fpt::fpt_ensemble(params, c.y_level, c.n_paths);
    csv::Writer w((dir / "fpt_samples.csv").string());
    w.header({"seed", "y_level", "tau", "censored"});
    for (std::size_t i = 0; i < res.taus.size(); ++i)
        w.row({static_cast<double>(i), c.y_level, res.taus[i],
               static_cast<double>(res.censored[i])});
    const averaging::EffectiveParams eff(c.gamma, c.kappa, c.sigma);
    csv::Writer study((dir / "fpt_study.csv").string());
    study.header({"gamma", "kappa", "sigma", "y_level", "mean_tau", "se", "tstar", "ratio"});
    study.row({c.gamma, c.kappa, c.sigma, c.y_level, res.mean, res.se, eff.tstar,
               res.mean / eff.tstar});
    s.result("mean_tau", res.mean);
    s.result("se", res.se);
    s.result("censor_fraction", res.censor_fraction);
    s.result("mean_is_lower_bound", res.mean_is_lower_bound);
    s.result("tail_rate", res.tail_rate);
    s.result("tail_r_squared", res.tail_r_squared);
    s.result("tstar", eff.tstar);
    s.result("mean_over_tstar", res.mean / eff.tstar);
    s.require_in("fpt_mean_over_tstar", res.mean / eff.tstar, 0.05, 20.0);
}

void run_avg_compare(const ExperimentConfig& c, const std::filesystem::path& dir, Summary& s) {
    const auto params = sim_params(c);
    const averaging::EffectiveParams eff(c.gamma, c.kappa, c.sigma);
    const double rescale =
        c.rescale_factor > 0.0 ? c.rescale_factor : averaging::default_time_rescale(eff);
    const double t_compare = c.t_compare > 0.0 ? c.t_compare : eff.tstar;
    const double s_target = t_compare / rescale;

    std::vector<double> ybar_full(c.n_paths), ybar_eff(c.n_paths);
    parallel::parallel_for(c.n_paths, [&](std::size_t i) {
        auto rng = rng::derive_stream(params.seed, i);
        dynamics::SimParams p = params;
        p.t_final = t_compare;
        p.output_stride = static_cast<std::size_t>(std::llround(p.t_final / p.dt));
        const auto tr = dynamics::simulate(p, su2::QuaternionState{}, rng);
        const std::size_t last = tr.size() - 1;
        const double y = 2.0 * tr.rho[last] - 1.0;
        ybar_full[i] =
            averaging::corrected_y(y, tr.z[last], tr.phi[last], c.gamma, c.kappa);
    });
    const double dt_eff = 1e-3;
    parallel::parallel_for(c.n_paths, [&](std::size_t i) {
        auto rng = rng::derive_stream(params.seed, static_cast<std::uint64_t>(c.n_paths) + i);
        std::normal_distribution<double> normal(0.0, 1.0);
        double y = -1.0;
        const auto n = static_cast<std::size_t>(std::llround(s_target / dt_eff));
        for (std::size_t k = 0; k < n; ++k) y = averaging::effective_1d_step(y, dt_eff, normal(rng));
        ybar_eff[i] = y;
    });

    csv::Writer w1((dir / "ybar_full.csv").string());
    w1.header({"path", "ybar"});
    for (int i = 0; i < c.n_paths; ++i) w1.row({static_cast<double>(i), ybar_full[i]});
    csv::Writer w2((dir / "ybar_effective.csv").string());
    w2.header({"path", "ybar"});
    for (int i = 0; i < c.n_paths; ++i) w2.row({static_cast<double>(i), ybar_eff[i]});

    const auto ks = stats::ks_two_sample(ybar_full, ybar_eff);
    s.result("t_compare", t_compare);
    s.result("rescale_factor", rescale);
    s.result("rescaled_time", s_target);
    s.result("ks_distance", ks.statistic);
    s.result("ks_p_value", ks.p_value);
    s.require_below("avg_ks_distance", ks.statistic, 0.1);
}

void run_brackets(const ExperimentConfig& c, const std::filesystem::path& dir, Summary& s) {
    auto rng = rng::derive_stream(c.seed.value(), 0);
    std::uniform_real_distribution<double> chi_dist(0.2, std::numbers::pi / 2.0 - 0.2);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    std::vector<su2::AngleState> pts(c.n_points);
    for (auto& a : pts) a = {chi_dist(rng), ang(rng), ang(rng)};

    const double bracket_residual = su2::verify_brackets(pts, c.fd_step);

    double det_err = 0.0;
    for (const auto& a : pts) {
        const double expected = -1.0 / std::sin(2.0 * a.chi);
        det_err = std::max(det_err, std::abs(su2::control_fields_det(a) - expected));
    }

    // homological equation residual of the averaging corrector, by central FD:
    // 2 z sqrt(1-y^2) sin(phi) - gamma z dw/dZ + dw/dphi = 0
    std::uniform_real_distribution<double> yd(-0.95, 0.95), zd(-2.0, 2.0);
    double hom_resid = 0.0;
    const double h = c.fd_step;
    for (int i = 0; i < c.n_points; ++i) {
        const double z = zd(rng), y = yd(rng), phi = ang(rng);
        const double dwdz = (averaging::corrector_w(z + h, y, phi, c.gamma) -
                             averaging::corrector_w(z - h, y, phi, c.gamma)) /
                            (2.0 * h);
        const double dwdphi = (averaging::corrector_w(z, y, phi + h, c.gamma) -
                               averaging::corrector_w(z, y, phi - h, c.gamma)) /
                              (2.0 * h);
        const double resid =
            2.0 * z * std::sqrt(1.0 - y * y) * std::sin(phi) - c.gamma * z * dwdz + dwdphi;
        hom_resid = std::max(hom_resid, std::abs(resid));
    }

    csv::Writer w((dir / "identities.csv").string());
    w.header({"bracket_residual", "det_error", "homological_residual"});
    w.row({bracket_residual, det_err, hom_resid});

    s.result("bracket_residual", bracket_residual);
    s.result("det_error", det_err);
    s.result("homological_residual", hom_resid);
    s.require_below("bracket_residual", bracket_residual, 1e-6);
    s.require_below("det_identity_error", det_err, 1e-10);
    s.require_below("homological_residual", hom_resid, 1e-6);
}

} // namespace

void ExperimentConfig::validate() const {
    if (std::find(known_experiments.begin(), known_experiments.end(), experiment) ==
        known_experiments.end())
        throw config_error("config: unknown experiment '" + experiment + "'");
    if (!seed.has_value()) throw config_error("config: seed is mandatory");
    if (n_paths < 1) throw config_error("config: n_paths must be >= 1");
    if (!(dt > 0.0) || !(t_final >= dt)) throw config_error("config: need dt > 0, t_final >= dt");
    if (experiment == "fpt" && !(y_level >= -1.0 && y_level < 1.0))
        throw config_error("config: y_level must be in [-1, 1)");
    if (experiment == "gap-study") {
        if (gamma_list.empty()) throw config_error("config: gamma_list must not be empty");
        if (!(kappa_sigma > 0.0 && kappa_sigma <= 0.1))
            throw config_error("config: kappa_sigma must be in (0, 0.1]");
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw config_error(std::string("config: parse error: ") + e.what());
    }

    ExperimentConfig c;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "experiment")
                c.experiment = value.get<std::string>();
            else if (key == "gamma")
                c.gamma = value.get<double>();
            else if (key == "kappa")
                c.kappa = value.get<double>();
            else if (key == "sigma")
                c.sigma = value.get<double>();
            else if (key == "dt")
                c.dt = value.get<double>();
            else if (key == "t_final")
                c.t_final = value.get<double>();
            else if (key == "output_stride")
                c.output_stride = value.get<std::size_t>();
            else if (key == "n_paths")
                c.n_paths = value.get<int>();
            else if (key == "seed")
                c.seed = value.get<std::uint64_t>();
            else if (key == "y_level")
                c.y_level = value.get<double>();
            else if (key == "kappa_sigma")
                c.kappa_sigma = value.get<double>();
            else if (key == "gamma_list")
                c.gamma_list = value.get<std::vector<double>>();
            else if (key == "rescale_factor")
                c.rescale_factor = value.get<double>();
            else if (key == "t_compare")
                c.t_compare = value.get<double>();
            else if (key == "n_points")
                c.n_points = value.get<int>();
            else if (key == "fd_step")
                c.fd_step = value.get<double>();
            else if (key == "out")
                c.out_dir = value.get<std::string>();
            else if (key == "galerkin") {
                for (const auto& [gk, gv] : value.items()) {
                    if (gk == "n_max")
                        c.galerkin.n_max = gv.get<int>();
                    else if (gk == "p_max")
                        c.galerkin.p_max = gv.get<int>();
                    else if (gk == "k_max")
                        c.galerkin.k_max = gv.get<int>();
                    else if (gk == "r")
                        c.galerkin.r = gv.get<int>();
                    else if (gk == "quad_points")
                        c.galerkin.quad_points = gv.get<int>();
                    else
                        throw config_error("config: unknown galerkin key '" + gk + "'");
                }
            } else {
                throw config_error("config: unknown key '" + key + "'");
            }
        } catch (const json::exception& e) {
            throw config_error("config: bad value for '" + key + "': " + e.what());
        }
    }
    return c;
}

int run(const ExperimentConfig& config) {
    try {
        config.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    try {
        const std::filesystem::path dir(config.out_dir);
        std::filesystem::create_directories(dir);
        Summary summary(config);
        if (config.experiment == "simulate")
            run_simulate(config, dir, summary);
        else if (config.experiment == "haar-test")
            run_haar_test(config, dir, summary);
        else if (config.experiment == "relaxation")
            run_relaxation(config, dir, summary);
        else if (config.experiment == "spectrum")
            run_spectrum(config, dir, summary);
        else if (config.experiment == "gap-study")
            run_gap_study(config, dir, summary);
        else if (config.experiment == "fpt")
            run_fpt(config, dir, summary);
        else if (config.experiment == "avg-compare")
            run_avg_compare(config, dir, summary);
        else if (config.experiment == "brackets")
            run_brackets(config, dir, summary);
        summary.write(dir, config.experiment);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace spinbath::harness
