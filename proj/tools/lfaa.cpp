// lfaa — anti-aliasing light field reconstruction toolkit CLI.
//
// Verbs: synth, analyze, reconstruct, train, infer, eval, curve.
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "lfaa/container_io.hpp"
#include "lfaa/danet/checkpoint.hpp"
#include "lfaa/danet/network.hpp"
#include "lfaa/danet/train.hpp"
#include "lfaa/image_io.hpp"
#include "lfaa/light_field.hpp"
#include "lfaa/metrics.hpp"
#include "lfaa/recon.hpp"
#include "lfaa/shear.hpp"
#include "lfaa/spectral.hpp"
#include "lfaa/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct GlobalOpts {
    uint64_t seed = 1;
    int threads = 0; // 0 = auto; kept for interface stability (single-threaded build)
    std::string out_dir = ".";
};

fs::path out_path(const GlobalOpts& g, const std::string& name) {
    fs::create_directories(g.out_dir);
    return fs::path(g.out_dir) / name;
}

std::vector<lfaa::ScenePoint4D> parse_scene_points(const json& j) {
    std::vector<lfaa::ScenePoint4D> pts;
    for (const auto& p : j.at("points")) {
        lfaa::ScenePoint4D sp;
        sp.u0 = p.at("u0").get<double>();
        sp.v0 = p.at("v0").get<double>();
        sp.d = p.at("d").get<double>();
        sp.intensity = p.value("intensity", 0.8);
        sp.width = p.value("width", 2.0);
        pts.push_back(sp);
    }
    return pts;
}

int cmd_synth(const GlobalOpts& g, const std::string& scene_file,
              const std::string& preset, const std::string& out,
              const std::string& dense_out, int alpha_s) {
    json scene;
    if (!preset.empty()) {
        if (preset != "fig2")
            throw lfaa::ValidationError("synth: unknown preset " + preset);
        // 4D projection of the analysis scene: the same disparity layout,
        // Lambertian, points spread across the image.
        scene = {{"width", 72},
                 {"height", 48},
                 {"views_s", 3},
                 {"views_t", 3},
                 {"points", json::array({{{"u0", 14.0}, {"v0", 16.0}, {"d", -0.6}, {"intensity", 0.85}, {"width", 2.2}},
                                         {{"u0", 30.0}, {"v0", 30.0}, {"d", 0.4}, {"intensity", 0.70}, {"width", 2.0}},
                                         {{"u0", 46.0}, {"v0", 18.0}, {"d", 0.9}, {"intensity", 0.60}, {"width", 2.5}},
                                         {{"u0", 58.0}, {"v0", 36.0}, {"d", 2.5}, {"intensity", 0.90}, {"width", 1.8}}})}};
    } else {
        std::ifstream is(scene_file);
        if (!is) throw lfaa::ValidationError("synth: cannot open scene " + scene_file);
        try {
            is >> scene;
        } catch (const json::exception& e) {
            throw lfaa::ValidationError(std::string("synth: bad scene JSON: ") + e.what());
        }
    }

    const auto pts = parse_scene_points(scene);
    auto [sparse, dense] = lfaa::render_light_field_oracle(
        pts, scene.at("width").get<int>(), scene.at("height").get<int>(),
        scene.at("views_s").get<int>(), scene.at("views_t").get<int>(), alpha_s);
    lfaa::write_light_field(out, sparse);
    if (!dense_out.empty()) lfaa::write_light_field(dense_out, dense);
    std::cout << "wrote " << out << " (" << sparse.views_s() << "x" << sparse.views_t()
              << " views)\n";
    (void)g;
    return 0;
}

int cmd_analyze(const GlobalOpts& g, const std::string& in, int v_star, int t_star,
                int step) {
    const lfaa::LightField4D lf = lfaa::read_light_field(in);
    if (v_star < 0) v_star = lf.height() / 2;
    if (t_star < 0) t_star = lf.views_t() / 2;
    const lfaa::Epi epi = lfaa::extract_epi_horizontal(lf, v_star, t_star);

    const lfaa::Spectrum spec = lfaa::epi_spectrum(epi);
    lfaa::Grid2D logmag = spec.log_magnitude();
    double peak = 0.0;
    for (size_t i = 0; i < logmag.size(); ++i) peak = std::max(peak, logmag.data()[i]);
    if (peak > 0.0)
        for (size_t i = 0; i < logmag.size(); ++i) logmag.data()[i] /= peak;
    lfaa::write_png_gray(out_path(g, "spectrum.png").string(), logmag);

    const auto d = epi.angular() >= 4 ? lfaa::estimate_dominant_disparity(epi)
                                      : std::nullopt;
    const lfaa::SpectralSupport support(d.value_or(0.0) / step, 0.0, 1.0);
    const lfaa::AliasingReport report = lfaa::locate_reference_alias(spec, support, step);

    {
        std::ofstream os(out_path(g, "alias_report.csv"));
        os << "omega_u_pa,omega_s_pa,amplitude,replica_index,overlap_detected,clean\n";
        os.precision(17);
        os << report.omega_u_pa << ',' << report.omega_s_pa << ',' << report.amplitude
           << ',' << report.replica_index << ',' << report.overlap_detected << ','
           << report.clean << '\n';
    }
    {
        const auto table = lfaa::sigma_alpha_curve(report, {5, 10, 15, 20, 25},
                                                   {1, 1.5, 2, 3, 4});
        std::ofstream os(out_path(g, "sigma_alpha.csv"));
        table.to_csv(os);
    }
    std::cout << "dominant disparity: " << (d ? std::to_string(*d) : "none")
              << ", alias " << (report.clean ? "clean" : "present") << '\n';
    return 0;
}

lfaa::ReconConfig make_recon_config(int alpha_s, const std::vector<double>& shears,
                                    double gamma, const std::string& fusion) {
    lfaa::ReconConfig cfg;
    cfg.alpha_s = alpha_s;
    if (!shears.empty()) cfg.shears = shears;
    std::sort(cfg.shears.begin(), cfg.shears.end());
    cfg.gamma = gamma;
    if (fusion == "global_best")
        cfg.fusion = lfaa::ReconConfig::Fusion::global_best;
    else if (fusion != "select_best_patch")
        throw lfaa::ValidationError("unknown fusion mode " + fusion);
    return cfg;
}

int cmd_reconstruct(const GlobalOpts& g, const std::string& in, const std::string& out,
                    int alpha_s, const std::vector<double>& shears, double gamma,
                    const std::string& fusion, const std::string& dump_dir) {
    const lfaa::LightField4D sparse = lfaa::read_light_field(in);
    const lfaa::ReconConfig cfg = make_recon_config(alpha_s, shears, gamma, fusion);

    if (!dump_dir.empty()) {
        const lfaa::Epi epi =
            lfaa::extract_epi_horizontal(sparse, sparse.height() / 2, sparse.views_t() / 2);
        fs::create_directories(dump_dir);
        for (double a : cfg.shears) {
            const auto cand = lfaa::reconstruct_single_shear(epi, a, cfg);
            char name[64];
            std::snprintf(name, sizeof(name), "candidate_%+05.1f.png", a);
            lfaa::write_png_gray((fs::path(dump_dir) / name).string(), cand.epi.samples);
        }
    }

    const auto epi_fn = [&](const lfaa::Epi& e) {
        return lfaa::reconstruct_multi(e, cfg).epi;
    };
    const lfaa::LightField4D dense = lfaa::reconstruct_4d(sparse, epi_fn, cfg.alpha_s);
    lfaa::write_light_field(out, dense);
    std::cout << "wrote " << out << " (" << dense.views_s() << "x" << dense.views_t()
              << " views)\n";
    (void)g;
    return 0;
}

lfaa::danet::Da2nConfig danet_config_from_json(const json& j) {
    lfaa::danet::Da2nConfig net;
    net.alpha_s = j.value("alpha_s", 3);
    if (j.contains("shears")) net.shears = j.at("shears").get<std::vector<double>>();
    return net;
}

int cmd_train(const GlobalOpts& g, const std::string& config_file,
              const std::string& out) {
    json j;
    if (!config_file.empty()) {
        std::ifstream is(config_file);
        if (!is) throw lfaa::ValidationError("train: cannot open config " + config_file);
        try {
            is >> j;
        } catch (const json::exception& e) {
            throw lfaa::ValidationError(std::string("train: bad config JSON: ") + e.what());
        }
    } else {
        j = json::object();
    }

    const lfaa::danet::Da2nConfig net_cfg = danet_config_from_json(j);
    lfaa::danet::TrainConfig tc;
    tc.steps = j.value("steps", 200);
    tc.batch = j.value("batch", 2);
    tc.seed = j.value("seed", g.seed);
    tc.lr_prefilter = j.value("lr_prefilter", tc.lr_prefilter);
    tc.lr_rest = j.value("lr_rest", tc.lr_rest);

    lfaa::TrainingSetConfig sc;
    sc.count_regular = j.value("count_regular", 512);
    sc.count_pseudo = j.value("count_pseudo", 0);
    sc.alpha_s = net_cfg.alpha_s;
    sc.d_min = j.value("d_min", -3.0);
    sc.d_max = j.value("d_max", 3.0);
    sc.nonlambertian_fraction = j.value("nonlambertian_fraction", 0.0);
    sc.seed = tc.seed;
    const lfaa::TrainingSet data = lfaa::make_training_set(sc);

    const lfaa::danet::Graph graph = lfaa::danet::build_da2n(net_cfg);
    lfaa::danet::NetworkParams params = lfaa::danet::init_params(graph, tc.seed);

    auto result = lfaa::danet::train(graph, std::move(params), tc, data.phase1);
    if (!data.phase2.empty()) {
        lfaa::danet::TrainConfig tc2 = tc;
        tc2.steps = j.value("steps_phase2", tc.steps / 4);
        tc2.seed = tc.seed + 1;
        auto r2 = lfaa::danet::train(graph, std::move(result.params), tc2, data.phase2);
        result.params = std::move(r2.params);
        result.loss_trace.insert(result.loss_trace.end(), r2.loss_trace.begin(),
                                 r2.loss_trace.end());
    }

    lfaa::danet::save_checkpoint(out, graph, result.params);
    {
        std::ofstream os(out_path(g, "loss_trace.csv"));
        os << "step,loss\n";
        os.precision(17);
        for (size_t i = 0; i < result.loss_trace.size(); ++i)
            os << i << ',' << result.loss_trace[i] << '\n';
    }
    std::cout << "wrote " << out << " (" << result.loss_trace.size() << " steps";
    if (!result.loss_trace.empty())
        std::cout << ", final loss " << result.loss_trace.back();
    std::cout << ")\n";
    return 0;
}

int cmd_infer(const GlobalOpts& g, const std::string& ckpt, const std::string& in,
              const std::string& out, int alpha_s, const std::vector<double>& shears) {
    lfaa::danet::Da2nConfig net_cfg;
    net_cfg.alpha_s = alpha_s;
    if (!shears.empty()) net_cfg.shears = shears;
    const lfaa::danet::Graph graph = lfaa::danet::build_da2n(net_cfg);
    lfaa::danet::NetworkParams params = lfaa::danet::load_checkpoint(ckpt, graph);

    const lfaa::LightField4D sparse = lfaa::read_light_field(in);
    const auto epi_fn = [&](const lfaa::Epi& e) {
        return lfaa::danet::danet_reconstruct(graph, params, e);
    };
    const lfaa::LightField4D dense = lfaa::reconstruct_4d(sparse, epi_fn, alpha_s);
    lfaa::write_light_field(out, dense);
    std::cout << "wrote " << out << '\n';
    (void)g;
    return 0;
}

int cmd_eval(const GlobalOpts& g, const std::string& in, const std::string& truth_dir,
             const std::string& pipeline, int alpha_s, const std::string& ckpt,
             const std::string& case_name) {
    const lfaa::LightField4D sparse = lfaa::read_light_field(in);
    const lfaa::LightField4D truth = lfaa::read_light_field(truth_dir);

    std::vector<lfaa::BenchmarkRow> rows;
    const auto run = [&](const std::string& name, const lfaa::EpiReconstructor& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        const lfaa::LightField4D dense = lfaa::reconstruct_4d(sparse, fn, alpha_s);
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        const lfaa::MetricReport rep = lfaa::score_light_field(dense, truth, alpha_s, ms);
        rows.push_back({case_name, name, alpha_s, rep.psnr_mean, rep.ssim_mean, ms});
    };

    if (pipeline == "classical" || pipeline == "both") {
        lfaa::ReconConfig cfg;
        cfg.alpha_s = alpha_s;
        run("classical",
            [&](const lfaa::Epi& e) { return lfaa::reconstruct_multi(e, cfg).epi; });
    }
    if (pipeline == "danet" || pipeline == "both") {
        if (ckpt.empty())
            throw lfaa::ValidationError("eval: danet pipeline needs --ckpt");
        lfaa::danet::Da2nConfig net_cfg;
        net_cfg.alpha_s = alpha_s;
        const lfaa::danet::Graph graph = lfaa::danet::build_da2n(net_cfg);
        lfaa::danet::NetworkParams params = lfaa::danet::load_checkpoint(ckpt, graph);
        run("danet", [&](const lfaa::Epi& e) {
            return lfaa::danet::danet_reconstruct(graph, params, e);
        });
    }
    if (rows.empty() && pipeline != "classical" && pipeline != "danet" &&
        pipeline != "both")
        throw lfaa::ValidationError("eval: unknown pipeline " + pipeline);

    std::ofstream os(out_path(g, "benchmark.csv"));
    lfaa::write_benchmark_csv(os, rows);
    lfaa::write_benchmark_csv(std::cout, rows);
    return 0;
}

int cmd_curve(const GlobalOpts& g, double amplitude, double omega, double gamma_hint) {
    lfaa::AliasingReport report;
    report.amplitude = amplitude;
    report.omega_u_pa = omega;
    report.replica_index = 1;
    report.clean = false;
    (void)gamma_hint;
    const auto table =
        lfaa::sigma_alpha_curve(report, {5, 10, 15, 20, 25}, {1, 1.5, 2, 3, 4});
    std::ofstream os(out_path(g, "sigma_alpha.csv"));
    table.to_csv(os);
    table.to_csv(std::cout);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"anti-aliasing light field reconstruction toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    if (const char* env = std::getenv("LFAA_THREADS")) g.threads = std::atoi(env);
    app.add_option("--seed", g.seed, "global RNG seed");
    app.add_option("--threads", g.threads, "thread count (default from LFAA_THREADS)");
    app.add_option("--out-dir", g.out_dir, "directory for auxiliary outputs");

    // synth
    auto* synth = app.add_subcommand("synth", "render a synthetic light field");
    std::string scene_file, preset, synth_out, dense_out;
    int synth_alpha = 3;
    synth->add_option("--scene", scene_file, "scene JSON file");
    synth->add_option("--preset", preset, "named preset (fig2)");
    synth->add_option("--out", synth_out, "output container")->required();
    synth->add_option("--dense-out", dense_out, "also write the dense oracle");
    synth->add_option("--alpha-s", synth_alpha, "oracle upsampling factor");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "spectral analysis of an EPI");
    std::string analyze_in;
    int v_star = -1, t_star = -1, step = 4;
    analyze->add_option("--in", analyze_in, "input container")->required();
    analyze->add_option("--v", v_star, "EPI row v*");
    analyze->add_option("--t", t_star, "EPI view t*");
    analyze->add_option("--step", step, "angular step for replica prediction");

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "classical multi-shear reconstruction");
    std::string rec_in, rec_out, fusion = "select_best_patch", dump_dir;
    std::vector<double> shears;
    int rec_alpha = 3;
    double gamma = 10.0;
    rec->add_option("--in", rec_in, "input container")->required();
    rec->add_option("--out", rec_out, "output container")->required();
    rec->add_option("--alpha-s", rec_alpha, "angular upsampling factor");
    rec->add_option("--shears", shears, "candidate shear amounts")->delimiter(',');
    rec->add_option("--gamma", gamma, "baseline amplitude");
    rec->add_option("--fusion", fusion, "select_best_patch | global_best");
    rec->add_option("--dump-candidates", dump_dir, "debug PNG directory");

    // train
    auto* train = app.add_subcommand("train", "train the network on synthetic EPIs");
    std::string train_config, train_out;
    train->add_option("--config", train_config, "training config JSON");
    train->add_option("--out", train_out, "output checkpoint")->required();

    // infer
    auto* infer = app.add_subcommand("infer", "network inference");
    std::string infer_ckpt, infer_in, infer_out;
    std::vector<double> infer_shears;
    int infer_alpha = 3;
    infer->add_option("--ckpt", infer_ckpt, "checkpoint")->required();
    infer->add_option("--in", infer_in, "input container")->required();
    infer->add_option("--out", infer_out, "output container")->required();
    infer->add_option("--alpha-s", infer_alpha, "angular upsampling factor");
    infer->add_option("--shears", infer_shears, "shear amounts")->delimiter(',');

    // eval
    auto* eval = app.add_subcommand("eval", "reconstruct and score against ground truth");
    std::string eval_in, eval_truth, eval_pipeline = "classical", eval_ckpt,
                eval_case = "case";
    int eval_alpha = 3;
    eval->add_option("--in", eval_in, "sparse input container")->required();
    eval->add_option("--truth", eval_truth, "dense ground-truth container")->required();
    eval->add_option("--pipeline", eval_pipeline, "classical | danet | both");
    eval->add_option("--alpha-s", eval_alpha, "angular upsampling factor");
    eval->add_option("--ckpt", eval_ckpt, "checkpoint for the danet pipeline");
    eval->add_option("--case", eval_case, "case name for the CSV");

    // curve
    auto* curve = app.add_subcommand("curve", "emit the sigma-alpha_u design table");
    double amplitude = 25.0, omega = 0.5, gamma_hint = 0.0;
    curve->add_option("--amplitude", amplitude, "alias amplitude |F(P_a)|");
    curve->add_option("--omega", omega, "alias frequency |Omega_u(P_a)| (radians)");

    // Let the global options (--seed, --threads, --out-dir) appear after the
    // verb as well.
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
        if (synth->parsed())
            return cmd_synth(g, scene_file, preset, synth_out, dense_out, synth_alpha);
        if (analyze->parsed()) return cmd_analyze(g, analyze_in, v_star, t_star, step);
        if (rec->parsed())
            return cmd_reconstruct(g, rec_in, rec_out, rec_alpha, shears, gamma, fusion,
                                   dump_dir);
        if (train->parsed()) return cmd_train(g, train_config, train_out);
        if (infer->parsed())
            return cmd_infer(g, infer_ckpt, infer_in, infer_out, infer_alpha,
                             infer_shears);
        if (eval->parsed())
            return cmd_eval(g, eval_in, eval_truth, eval_pipeline, eval_alpha, eval_ckpt,
                            eval_case);
        if (curve->parsed()) return cmd_curve(g, amplitude, omega, gamma_hint);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const lfaa::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const lfaa::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
