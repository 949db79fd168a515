// quakeml: classify smartphone-network earthquake detections, replay the
// detection algorithm, and run the Monte Carlo calibration study.
//
// Exit codes: 0 true earthquake / success, 2 input error, 3 false detection,
// 4 unclassifiable (n < 4), 5 no detection.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "quakeml/csv.hpp"
#include "quakeml/detector.hpp"
#include "quakeml/errors.hpp"
#include "quakeml/estimation.hpp"
#include "quakeml/hypothesis.hpp"
#include "quakeml/simulate.hpp"
#include "quakeml/stats.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace quakeml;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitFalseDetection = 3;
constexpr int kExitUnclassifiable = 4;
constexpr int kExitNoDetection = 5;

json interval_json(const Interval& iv) {
    auto num = [](double v) -> json {
        if (std::isfinite(v)) return v;
        return v > 0 ? json("inf") : json("-inf");
    };
    return json::array({num(iv.lo), num(iv.hi)});
}

json fit_json(const FitResult& fit) {
    json est;
    est["lat"] = fit.hypocenter.epicentre.lat;
    est["lon"] = fit.hypocenter.epicentre.lon;
    est["depth_km"] = fit.hypocenter.depth_km;
    est["ci"] = {{"lat", interval_json(fit.conf_intervals.lat)},
                 {"lon", interval_json(fit.conf_intervals.lon)},
                 {"depth_km", interval_json(fit.conf_intervals.depth_km)},
                 {"level", fit.conf_intervals.level}};
    json j;
    j["estimate"] = est;
    j["sigma2"] = fit.sigma2;
    j["objective"] = fit.objective;
    j["log_likelihood"] =
        std::isfinite(fit.log_likelihood) ? json(fit.log_likelihood) : json("inf");
    j["converged"] = fit.converged;
    j["degenerate"] = fit.degenerate;
    j["depth_at_bound"] = fit.depth_at_bound;
    return j;
}

json test_json(const VelocityTestResult& t) {
    json j;
    j["v"] = t.v.v_kms;
    j["label"] = wave_label_name(t.v.label);
    j["estimate"] = fit_json(t.fit)["estimate"];
    j["sigma2"] = t.fit.sigma2;
    j["T"] = t.statistic;
    j["df"] = t.df;
    j["critical"] = t.critical;
    j["rejected"] = t.rejected;
    return j;
}

json bbox_json(std::span<const Trigger> triggers) {
    double lat_lo = 90, lat_hi = -90, lon_lo = 360, lon_hi = -360;
    for (const auto& t : triggers) {
        lat_lo = std::min(lat_lo, t.location.lat);
        lat_hi = std::max(lat_hi, t.location.lat);
        lon_lo = std::min(lon_lo, t.location.lon);
        lon_hi = std::max(lon_hi, t.location.lon);
    }
    return {{"lat", {lat_lo, lat_hi}}, {"lon", {lon_lo, lon_hi}}};
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw InvalidInput("cannot write '" + out_path + "'");
        out << j.dump(2) << "\n";
    }
}

struct EstimatorFlags {
    EstimatorConfig cfg;

    void attach(CLI::App* cmd) {
        cmd->add_option("--restarts", cfg.restarts, "Multi-start restarts")
            ->capture_default_str();
        cmd->add_option("--depth-min", cfg.depth_min_km, "Depth lower bound, km")
            ->capture_default_str();
        cmd->add_option("--depth-max", cfg.depth_max_km, "Depth upper bound, km")
            ->capture_default_str();
        cmd->add_option("--box-margin", cfg.box_margin_deg,
                        "Search box margin around the trigger bounding box, deg")
            ->capture_default_str();
        cmd->add_option("--tol", cfg.tolerance, "Objective convergence tolerance")
            ->capture_default_str();
        cmd->add_option("--max-iter", cfg.max_iterations,
                        "Max iterations per restart")
            ->capture_default_str();
        cmd->add_option("--level", cfg.confidence_level, "Confidence level")
            ->capture_default_str();
    }

    json echo() const {
        return {{"restarts", cfg.restarts},
                {"depth_min_km", cfg.depth_min_km},
                {"depth_max_km", cfg.depth_max_km},
                {"box_margin_deg", cfg.box_margin_deg},
                {"tolerance", cfg.tolerance},
                {"max_iterations", cfg.max_iterations},
                {"confidence_level", cfg.confidence_level}};
    }
};

struct DetectorFlags {
    DetectorConfig cfg;

    void attach(CLI::App* cmd) {
        cmd->add_option("--radius", cfg.radius_km, "Detection area radius, km")
            ->capture_default_str();
        cmd->add_option("--window", cfg.window_s, "Sliding window, s")
            ->capture_default_str();
        cmd->add_option("--ratio", cfg.ratio_threshold,
                        "Triggering/active ratio threshold")
            ->capture_default_str();
        cmd->add_option("--min-triggers", cfg.min_triggers,
                        "Minimum concurring triggers")
            ->capture_default_str();
    }

    json echo() const {
        return {{"radius_km", cfg.radius_km},
                {"window_s", cfg.window_s},
                {"ratio_threshold", cfg.ratio_threshold},
                {"min_triggers", cfg.min_triggers}};
    }
};

struct TrueEventFlags {
    TrueEventSpec ev;
    double velocity = 7.8;

    void attach(CLI::App* cmd) {
        cmd->add_option("--depth-lo", ev.depth_min_km, "Event depth lower bound, km")
            ->capture_default_str();
        cmd->add_option("--depth-hi", ev.depth_max_km, "Event depth upper bound, km")
            ->capture_default_str();
        cmd->add_option("--velocity", velocity, "Generating wave speed, km/s")
            ->capture_default_str();
        cmd->add_option("--p-trigger", ev.p_triggering,
                        "Probability a phone triggers on the wave")
            ->capture_default_str();
        cmd->add_option("--noise-var", ev.noise_variance,
                        "Triggering-time error variance, s^2")
            ->capture_default_str();
        cmd->add_option("--p-spurious", ev.p_spurious,
                        "Spurious-trigger probability among non-triggering phones")
            ->capture_default_str();
        cmd->add_option("--spurious-lo", ev.spurious_lo_s, "Spurious window start, s")
            ->capture_default_str();
        cmd->add_option("--spurious-hi", ev.spurious_hi_s, "Spurious window end, s")
            ->capture_default_str();
    }

    TrueEventSpec spec() const {
        TrueEventSpec s = ev;
        s.v = WaveSpeed::primary(velocity);
        return s;
    }
};

struct NetworkFlags {
    NetworkSpec net;
    std::string roster_file;

    void attach(CLI::App* cmd) {
        cmd->add_option("--phones", net.count, "Number of smartphones")
            ->capture_default_str();
        cmd->add_option("--lat-lo", net.lat_lo, "Network box: min latitude")
            ->capture_default_str();
        cmd->add_option("--lat-hi", net.lat_hi, "Network box: max latitude")
            ->capture_default_str();
        cmd->add_option("--lon-lo", net.lon_lo, "Network box: min longitude")
            ->capture_default_str();
        cmd->add_option("--lon-hi", net.lon_hi, "Network box: max longitude")
            ->capture_default_str();
        cmd->add_option("--roster", roster_file,
                        "Load phone locations from a roster CSV instead of "
                        "sampling them");
    }

    std::vector<Smartphone> make(std::uint64_t seed) const {
        if (!roster_file.empty()) return read_roster_file(roster_file);
        Rng rng(derive_seed(seed, 0));
        return generate_network(net, rng);
    }
};

int cmd_classify(const std::string& path, const TestSpec& spec,
                 double vp, double vs, const EstimatorConfig& est,
                 std::uint64_t seed, const std::string& out_path,
                 const json& config_echo) {
    const auto triggers = read_triggers_file(path);

    json j;
    if (triggers.size() < 4) {
        std::cerr << "insufficient triggers (n=" << triggers.size() << " < 4)\n";
        j["verdict"] = "unclassifiable";
        j["input"] = {{"n", triggers.size()}, {"bbox", bbox_json(triggers)}};
        j["seed"] = seed;
        j["config"] = config_echo;
        emit(j, out_path);
        return kExitUnclassifiable;
    }

    EstimatorConfig cfg = est;
    cfg.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    const auto cls = classify(triggers, spec, cfg, WaveSpeed::primary(vp),
                              WaveSpeed::secondary(vs));
    const auto t1 = std::chrono::steady_clock::now();
    const double ms =
        std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count() /
        1000.0;

    j["verdict"] = cls.verdict == Verdict::true_earthquake ? "true_earthquake"
                                                           : "false_detection";
    j["tests"] = json::array({test_json(cls.primary_test),
                              test_json(cls.secondary_test)});
    j["input"] = {{"n", triggers.size()}, {"bbox", bbox_json(triggers)}};
    j["timing_ms"] = ms;
    j["seed"] = seed;
    j["config"] = config_echo;
    emit(j, out_path);
    return cls.verdict == Verdict::true_earthquake ? kExitOk : kExitFalseDetection;
}

void write_plot_file(const std::string& path,
                     std::span<const Smartphone> network,
                     std::span<const Trigger> stream,
                     const Detection* det, const Hypocenter* truth) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    std::map<std::string, double> trigger_time;
    for (const auto& t : stream) trigger_time[t.id] = t.time_s;
    std::set<std::string> concurring;
    if (det)
        for (const auto& t : det->triggers) concurring.insert(t.id);
    out << "id,lat,lon,kind,t\n";
    for (const auto& p : network) {
        auto it = trigger_time.find(p.id);
        const char* kind = "active";
        std::string t;
        if (it != trigger_time.end()) {
            kind = concurring.count(p.id) ? "concurring" : "trigger";
            t = format_double(it->second);
        }
        out << p.id << ',' << format_double(p.location.lat) << ','
            << format_double(p.location.lon) << ',' << kind << ',' << t << '\n';
    }
    if (truth)
        out << "epicentre," << format_double(truth->epicentre.lat) << ','
            << format_double(truth->epicentre.lon) << ",epicentre,\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Statistical true/false classification of smartphone-network "
                 "earthquake detections"};
    app.require_subcommand(1);
    app.fallthrough();  // accept --seed/--config after the subcommand name
    app.set_config("--config", "", "Read defaults from a key=value file");
    app.get_config_formatter_base()->valueSeparator('=');

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "RNG seed (env QUAKEML_SEED)")
        ->envname("QUAKEML_SEED")
        ->capture_default_str();

    // ---- classify ----
    auto* c_classify = app.add_subcommand(
        "classify", "Classify a trigger file as a true or false detection");
    std::string classify_file, classify_out;
    TestSpec test_spec;
    double vp = 7.8, vs = 4.5;
    EstimatorFlags classify_est;
    c_classify->add_option("triggers", classify_file, "Trigger CSV (id,lat,lon,t)")
        ->required();
    c_classify->add_option("--delta", test_spec.delta, "Null variance, s^2")
        ->capture_default_str();
    c_classify->add_option("--alpha", test_spec.alpha, "Significance level")
        ->capture_default_str();
    c_classify->add_option("--vp", vp, "Primary wave speed, km/s")
        ->capture_default_str();
    c_classify->add_option("--vs", vs, "Secondary wave speed, km/s")
        ->capture_default_str();
    classify_est.attach(c_classify);
    c_classify->add_option("--out", classify_out, "Write the JSON report here");

    // ---- estimate ----
    auto* c_estimate = app.add_subcommand(
        "estimate", "Fit the hypocentre at one wave speed, no test");
    std::string estimate_file, estimate_out;
    double est_velocity = 7.8;
    EstimatorFlags estimate_est;
    c_estimate->add_option("triggers", estimate_file, "Trigger CSV")->required();
    c_estimate->add_option("--velocity", est_velocity, "Wave speed, km/s")
        ->capture_default_str();
    estimate_est.attach(c_estimate);
    c_estimate->add_option("--out", estimate_out, "Write the JSON report here");

    // ---- detect ----
    auto* c_detect = app.add_subcommand(
        "detect", "Replay the detection algorithm over a trigger stream");
    std::string detect_stream, detect_roster, detect_out;
    DetectorFlags detect_det;
    c_detect->add_option("stream", detect_stream, "Time-sorted trigger CSV")
        ->required();
    c_detect->add_option("roster", detect_roster, "Roster CSV (id,lat,lon)")
        ->required();
    detect_det.attach(c_detect);
    c_detect->add_option("--out", detect_out,
                         "Write the concurring sub-list CSV here");

    // ---- simulate ----
    auto* c_simulate = app.add_subcommand(
        "simulate", "Generate synthetic true/false detections");
    std::string sim_kind = "true", sim_dir;
    std::size_t sim_reps = 1;
    NetworkFlags sim_net;
    TrueEventFlags sim_true;
    FalseEventSpec sim_false;
    DetectorFlags sim_det;
    c_simulate->add_option("--kind", sim_kind, "true | false")
        ->check(CLI::IsMember({"true", "false"}))
        ->capture_default_str();
    c_simulate->add_option("--replications", sim_reps, "Number of replications")
        ->capture_default_str();
    c_simulate->add_option("--out", sim_dir, "Output directory")->required();
    sim_net.attach(c_simulate);
    sim_true.attach(c_simulate);
    c_simulate
        ->add_option("--false-p-trigger", sim_false.p_triggering,
                     "False event: triggering probability")
        ->capture_default_str();
    c_simulate
        ->add_option("--false-window-lo", sim_false.window_lo_s,
                     "False event: window start, s")
        ->capture_default_str();
    c_simulate
        ->add_option("--false-window-hi", sim_false.window_hi_s,
                     "False event: window end, s")
        ->capture_default_str();
    sim_det.attach(c_simulate);

    // ---- calibrate ----
    auto* c_calibrate = app.add_subcommand(
        "calibrate", "Monte Carlo calibration of the null variance delta");
    std::size_t cal_reps = 1000;
    double cal_alpha = 0.01;
    std::string cal_out, cal_hist, cal_box;
    NetworkFlags cal_net;
    TrueEventFlags cal_true;
    FalseEventSpec cal_false;
    DetectorFlags cal_det;
    EstimatorFlags cal_est;
    double cal_vs = 4.5;
    c_calibrate->add_option("--replications", cal_reps, "Replications per arm")
        ->capture_default_str();
    c_calibrate->add_option("--alpha", cal_alpha, "Target type I error")
        ->capture_default_str();
    cal_net.attach(c_calibrate);
    cal_true.attach(c_calibrate);
    c_calibrate
        ->add_option("--false-p-trigger", cal_false.p_triggering,
                     "False event: triggering probability")
        ->capture_default_str();
    c_calibrate
        ->add_option("--false-window-lo", cal_false.window_lo_s,
                     "False event: window start, s")
        ->capture_default_str();
    c_calibrate
        ->add_option("--false-window-hi", cal_false.window_hi_s,
                     "False event: window end, s")
        ->capture_default_str();
    cal_det.attach(c_calibrate);
    cal_est.attach(c_calibrate);
    c_calibrate->add_option("--vs", cal_vs, "Secondary wave speed, km/s")
        ->capture_default_str();
    c_calibrate->add_option("--out", cal_out, "Write the JSON report here");
    c_calibrate->add_option("--hist-out", cal_hist,
                            "Write sigma^2 histogram data (CSV) here");
    c_calibrate->add_option("--box-out", cal_box,
                            "Write error box-plot data (CSV) here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_classify) {
            json echo = {{"delta", test_spec.delta},
                         {"alpha", test_spec.alpha},
                         {"vp", vp},
                         {"vs", vs},
                         {"estimator", classify_est.echo()}};
            return cmd_classify(classify_file, test_spec, vp, vs,
                                classify_est.cfg, seed, classify_out, echo);
        }

        if (*c_estimate) {
            const auto triggers = read_triggers_file(estimate_file);
            if (triggers.size() < 4) {
                std::cerr << "insufficient triggers (n=" << triggers.size()
                          << " < 4)\n";
                return kExitUnclassifiable;
            }
            EstimatorConfig cfg = estimate_est.cfg;
            cfg.seed = seed;
            const auto fit =
                estimate_hypocenter(triggers, WaveSpeed::primary(est_velocity), cfg);
            json j;
            j["velocity"] = est_velocity;
            j.update(fit_json(fit));
            json res = json::array();
            for (double d : fit.residuals.deltas_s) res.push_back(d);
            j["residuals"] = {{"deltas", res}, {"mean", fit.residuals.mean_s}};
            j["input"] = {{"n", triggers.size()}, {"bbox", bbox_json(triggers)}};
            j["seed"] = seed;
            j["config"] = estimate_est.echo();
            emit(j, estimate_out);
            return kExitOk;
        }

        if (*c_detect) {
            const auto stream = read_triggers_file(detect_stream);
            const auto roster = read_roster_file(detect_roster);
            const auto det = detect(stream, roster, detect_det.cfg);
            if (!det) {
                std::cout << "no detection\n";
                return kExitNoDetection;
            }
            std::cerr << "detection at t=" << format_double(det->detection_time_s)
                      << " s, center (" << format_double(det->center.lat) << ", "
                      << format_double(det->center.lon) << "), n="
                      << det->triggers.size() << ", active=" << det->active_count
                      << "\n";
            if (detect_out.empty()) {
                write_triggers(std::cout, det->triggers);
            } else {
                std::ofstream out(detect_out);
                if (!out) throw InvalidInput("cannot write '" + detect_out + "'");
                write_triggers(out, det->triggers);
            }
            return kExitOk;
        }

        if (*c_simulate) {
            fs::create_directories(sim_dir);
            const auto network = sim_net.make(seed);
            {
                std::ofstream out(fs::path(sim_dir) / "roster.csv");
                if (!out) throw InvalidInput("cannot write roster.csv in '" +
                                             sim_dir + "'");
                write_roster(out, network);
            }
            std::ofstream truth_out(fs::path(sim_dir) / "ground_truth.csv");
            if (!truth_out)
                throw InvalidInput("cannot write ground_truth.csv in '" + sim_dir + "'");
            truth_out << "rep,lat,lon,depth_km,detected,n\n";

            std::size_t detected = 0;
            for (std::size_t rep = 0; rep < sim_reps; ++rep) {
                char tag[32];
                std::snprintf(tag, sizeof tag, "rep_%04zu", rep);
                Rng rng(derive_seed(seed, sim_kind == "true" ? 1 : 3, rep));

                std::vector<Trigger> stream;
                std::optional<Hypocenter> truth;
                if (sim_kind == "true") {
                    auto draw = generate_true_event(network, sim_true.spec(), rng);
                    stream = std::move(draw.stream);
                    truth = draw.truth;
                } else {
                    stream = generate_false_event(network, sim_false, rng);
                }
                const auto det = detect(stream, network, sim_det.cfg);
                if (det) ++detected;

                {
                    std::ofstream out(fs::path(sim_dir) /
                                      (std::string(tag) + "_stream.csv"));
                    write_triggers(out, stream);
                }
                if (det) {
                    std::ofstream out(fs::path(sim_dir) /
                                      (std::string(tag) + "_triggers.csv"));
                    write_triggers(out, det->triggers);
                }
                write_plot_file(
                    (fs::path(sim_dir) / (std::string(tag) + "_plot.csv")).string(),
                    network, stream, det ? &*det : nullptr,
                    truth ? &*truth : nullptr);
                if (truth)
                    truth_out << rep << ',' << format_double(truth->epicentre.lat)
                              << ',' << format_double(truth->epicentre.lon) << ','
                              << format_double(truth->depth_km) << ','
                              << (det ? 1 : 0) << ','
                              << (det ? det->triggers.size() : 0) << '\n';
            }
            std::cerr << "detections: " << detected << "/" << sim_reps << "\n";
            return kExitOk;
        }

        if (*c_calibrate) {
            if (cal_reps < 100) {
                std::cerr << "insufficient replications (" << cal_reps
                          << " < 100)\n";
                return kExitInputError;
            }
            CalibrationConfig cfg;
            cfg.network = cal_net.net;
            cfg.true_event = cal_true.spec();
            cfg.false_event = cal_false;
            cfg.detector = cal_det.cfg;
            cfg.estimator = cal_est.cfg;
            cfg.primary = cfg.true_event.v;
            cfg.secondary = WaveSpeed::secondary(cal_vs);
            cfg.replications = cal_reps;
            cfg.alpha = cal_alpha;
            cfg.seed = seed;
            const auto result = run_calibration(cfg);

            json j;
            j["delta"] = result.report.delta;
            j["delta_floored"] = result.report.delta_floored;
            j["type1"] = result.report.type1;
            j["type2"] = result.report.type2;
            j["epicentre_error_km"] = {{"q1", result.report.epicentre_error_km.q1},
                                       {"median", result.report.epicentre_error_km.median},
                                       {"q3", result.report.epicentre_error_km.q3}};
            j["depth_error_km"] = {{"q1", result.report.depth_error_km.q1},
                                   {"median", result.report.depth_error_km.median},
                                   {"q3", result.report.depth_error_km.q3}};
            j["replications"] = result.report.replications;
            j["true_detected"] = result.report.true_detected;
            j["false_detected"] = result.report.false_detected;
            j["alpha"] = cal_alpha;
            j["seed"] = seed;
            j["config"] = {{"network",
                            {{"count", cfg.network.count},
                             {"lat", {cfg.network.lat_lo, cfg.network.lat_hi}},
                             {"lon", {cfg.network.lon_lo, cfg.network.lon_hi}}}},
                           {"detector", cal_det.echo()},
                           {"estimator", cal_est.echo()}};
            emit(j, cal_out);

            if (!cal_hist.empty()) {
                std::ofstream out(cal_hist);
                if (!out) throw InvalidInput("cannot write '" + cal_hist + "'");
                out << "kind,sigma2\n";
                for (double s : result.sigma2_true) out << "true," << format_double(s) << '\n';
                for (double s : result.sigma2_false) out << "false," << format_double(s) << '\n';
            }
            if (!cal_box.empty()) {
                std::ofstream out(cal_box);
                if (!out) throw InvalidInput("cannot write '" + cal_box + "'");
                out << "kind,value_km\n";
                for (double e : result.epicentre_errors_km)
                    out << "epicentre," << format_double(e) << '\n';
                for (double e : result.depth_errors_km)
                    out << "depth," << format_double(e) << '\n';
            }
            return kExitOk;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const InsufficientData& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnclassifiable;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
