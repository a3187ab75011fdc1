// netmod: command-line front-end for the joint-triangularization library.
// Every subcommand reads matrices in the shared JSON format, writes a report
// (JSON or CSV with identical numeric content) to stdout or --out, and exits
// 0 on success, 2 on infeasibility verdicts, 1 on errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netmod/decomp.hpp"
#include "netmod/errors.hpp"
#include "netmod/exact2.hpp"
#include "netmod/json_io.hpp"
#include "netmod/matcore.hpp"
#include "netmod/multicast.hpp"
#include "netmod/rateless.hpp"
#include "netmod/rng.hpp"
#include "netmod/spacetime.hpp"

using nlohmann::json;

namespace {

using namespace netmod;

struct CommonOpts {
    std::string out;
    std::string format = "json";
    Tolerances tol;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--out", c.out, "write the report to this path instead of stdout");
    cmd->add_option("--format", c.format, "report format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--tol-structural", c.tol.structural, "structural predicate tolerance");
    cmd->add_option("--tol-rank", c.tol.rank, "relative rank tolerance");
    cmd->add_option("--tol-psd", c.tol.psd, "PSD clamp window");
    c.seed_opt = cmd->add_option("--seed", c.seed, "RNG seed (drawn from entropy when omitted)");
}

std::uint64_t ensure_seed(CommonOpts& c) {
    if (c.seed_opt == nullptr || c.seed_opt->count() == 0) {
        std::random_device rd;
        c.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    return c.seed;
}

// Reports embed everything needed to reproduce them: version, the config
// echo, the tolerances in effect, and the seed.
json base_report(const char* command, CommonOpts& c, json config) {
    config["format"] = c.format;
    return json{{"version", kVersion},
                {"command", command},
                {"config", std::move(config)},
                {"tolerances",
                 {{"structural", c.tol.structural}, {"rank", c.tol.rank}, {"psd", c.tol.psd}}},
                {"seed", ensure_seed(c)}};
}

// CSV rows are the depth-first flattening of the JSON report; floats go
// through the same 17-digit formatter, so the numeric content is identical.
void csv_flatten(const json& j, const std::string& prefix, std::string& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            csv_flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        for (size_t i = 0; i < j.size(); ++i)
            csv_flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else if (j.is_number_float()) {
        out += prefix + "," + format_double(j.get<double>()) + "\n";
    } else {
        out += prefix + "," + j.dump() + "\n";
    }
}

void emit(const json& report, const CommonOpts& c) {
    std::string text;
    if (c.format == "csv") {
        text = "key,value\n";
        csv_flatten(report, "", text);
    } else {
        text = dump_json(report) + "\n";
    }
    if (c.out.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        std::ofstream f(c.out);
        if (!f) throw ParseError("cannot write report to " + c.out);
        f << text;
    }
}

double rel_recon_error(const Mat& a, const Mat& u, const Mat& t, const Mat& v) {
    return fro_norm(a - u * t * adjoint(v)) / std::max(fro_norm(a), 1e-300);
}

std::vector<double> real_diag(const Mat& m) {
    std::vector<double> d;
    for (int k = 0; k < std::min(m.rows(), m.cols()); ++k) d.push_back(m(k, k).real());
    return d;
}

int run_gmd(CommonOpts& c, const std::string& in) {
    Mat a = load_matrix(in);
    GmdResult g = gmd(a, c.tol);
    json rep = base_report("gmd", c, {{"in", in}});
    rep["lambda"] = g.lambda;
    rep["U"] = matrix_to_json(g.U);
    rep["T"] = matrix_to_json(g.T);
    rep["V"] = matrix_to_json(g.V);
    rep["reconstruction_rel_error"] = rel_recon_error(a, g.U, g.T, g.V);
    emit(rep, c);
    return 0;
}

int run_jet(CommonOpts& c, const std::string& in1, const std::string& in2) {
    Mat a1 = load_matrix(in1), a2 = load_matrix(in2);
    JetResult jt = jet2(a1, a2, c.tol);
    json rep = base_report("jet", c, {{"in1", in1}, {"in2", in2}});
    rep["U1"] = matrix_to_json(jt.U1);
    rep["U2"] = matrix_to_json(jt.U2);
    rep["V"] = matrix_to_json(jt.V);
    rep["R1"] = matrix_to_json(jt.R1);
    rep["R2"] = matrix_to_json(jt.R2);
    rep["diag"] = real_diag(jt.R1);
    rep["reconstruction_rel_error"] = {rel_recon_error(a1, jt.U1, jt.R1, jt.V),
                                       rel_recon_error(a2, jt.U2, jt.R2, jt.V)};
    emit(rep, c);
    return 0;
}

int run_kjet(CommonOpts& c, const std::vector<std::string>& files) {
    json rep = base_report("kjet", c, {{"g", files}});
    if (files.size() == 2) return run_jet(c, files[0], files[1]);
    if (files.size() != 3)
        throw InvalidParams("kjet handles two or three matrices; use stgmd for more users");

    std::vector<Mat> g_list;
    for (const auto& f : files) g_list.push_back(load_matrix(f));
    if (g_list[0].rows() != 2)
        throw InvalidParams("the exact three-matrix lift needs 2x2 inputs; use stgmd otherwise");
    std::vector<Mat> ratios = build_ratio_matrices(g_list, c.tol);
    for (const Mat& r : ratios)
        if (!is_real(r, c.tol.structural))
            throw InvalidParams("the exact three-matrix lift needs real ratios; use stgmd");

    try {
        Exact2GmdResult e =
            exact_2gmd(real_part(ratios[0]), real_part(ratios[1]), c.tol);
        KJetResult kr = kgmd_to_kjet(g_list, {e.U1, e.U2}, e.V, c.tol);
        rep["feasible"] = true;
        json us = json::array(), rs = json::array();
        for (const Mat& u : kr.U_list) us.push_back(matrix_to_json(u));
        for (const Mat& r : kr.R_list) rs.push_back(matrix_to_json(r));
        rep["U_list"] = std::move(us);
        rep["R_list"] = std::move(rs);
        rep["V"] = matrix_to_json(kr.V);
        rep["diag"] = real_diag(kr.R_list[0]);
        emit(rep, c);
        return 0;
    } catch (const Infeasible&) {
        rep["feasible"] = false;
        emit(rep, c);
        return 2;
    }
}

int run_exact2(CommonOpts& c, const std::string& in1, const std::string& in2) {
    Mat a1 = load_matrix(in1), a2 = load_matrix(in2);
    JetResidualResult jr = jet_residual(a1, a2, c.tol);
    json rep = base_report("exact2", c, {{"in1", in1}, {"in2", in2}});
    rep["residual"] = {{"r1", jr.residual.r1},
                       {"r2", jr.residual.r2},
                       {"x1", jr.residual.x1},
                       {"x2", jr.residual.x2}};
    const bool feasible = feasibility_2gmd(jr.residual, c.tol);
    rep["feasible"] = feasible;
    if (feasible) {
        ResidualGmd g = gmd_from_residual(jr.residual, c.tol);
        Mat u1 = jr.U1 * g.W1, u2 = jr.U2 * g.W2, v = jr.V * g.V;
        rep["U1"] = matrix_to_json(u1);
        rep["U2"] = matrix_to_json(u2);
        rep["V"] = matrix_to_json(v);
        rep["s1"] = {g.s1.real(), g.s1.imag()};
        rep["s2"] = g.s2;
    }
    emit(rep, c);
    return feasible ? 0 : 2;
}

int run_stgmd(CommonOpts& c, const std::vector<std::string>& files, int blocks, bool normalize) {
    std::vector<Mat> a_list;
    for (const auto& f : files) a_list.push_back(load_matrix(f));
    if (normalize)
        for (Mat& a : a_list) {
            const double mag = std::abs(det(a));
            if (mag <= 0.0) throw Singular("stgmd: cannot normalize a singular matrix");
            a = a * cplx(1.0 / std::pow(mag, 1.0 / a.rows()));
        }
    SpaceTimeDecomp st = st_kgmd(a_list, blocks, c.tol);

    json rep = base_report("stgmd", c,
                           {{"in", files, }, {"blocks", blocks}, {"normalize", normalize}});
    rep["retained"] = st.retained;
    rep["dropped"] = st.dropped;
    rep["blocks_used"] = st.blocks;
    rep["diag_constant"] = st.diag_constant;
    json us = json::array(), ts = json::array(), diags = json::array(),
         proj = json::array(), orth = json::array();
    for (size_t i = 0; i < st.U_list.size(); ++i) {
        us.push_back(matrix_to_json(st.U_list[i]));
        ts.push_back(matrix_to_json(st.T_list[i]));
        diags.push_back(real_diag(st.T_list[i]));
        Mat resid = adjoint(st.U_list[i]) * block_apply(a_list[i], st.V) - st.T_list[i];
        proj.push_back(fro_norm(resid) / std::max(fro_norm(st.T_list[i]), 1e-300));
        orth.push_back(orthonormal_error(st.U_list[i]));
    }
    rep["U_list"] = std::move(us);
    rep["T_list"] = std::move(ts);
    rep["diag"] = std::move(diags);
    rep["projection_rel_error"] = std::move(proj);
    rep["orthonormal_error"] = std::move(orth);
    rep["V"] = matrix_to_json(st.V);
    emit(rep, c);
    return 0;
}

const char* mode_name(SchemeMode m) {
    switch (m) {
        case SchemeMode::two_user_exact: return "two_user_exact";
        case SchemeMode::k_user_exact: return "k_user_exact";
        default: return "k_user_spacetime";
    }
}

json scheme_report(const MulticastScheme& s) {
    json j;
    j["mode"] = mode_name(s.mode);
    j["capacity"] = s.capacity;
    j["blocks"] = s.blocks;
    j["streams"] = s.streams;
    j["diag_gains"] = s.diag_gains;
    j["stream_rates"] = s.stream_rates;
    double sum = 0.0;
    for (double r : s.stream_rates) sum += r;
    j["sum_rate_per_use"] = sum / s.blocks;
    json diags = json::array();
    for (const Mat& t : s.T) {
        json d = json::array();
        for (int k = 0; k < t.rows(); ++k) d.push_back(t(k, k).real());
        diags.push_back(std::move(d));
    }
    j["per_user_diag"] = std::move(diags);
    j["V"] = matrix_to_json(s.V);
    return j;
}

MulticastScheme scheme_from_files(const std::vector<std::string>& h_files,
                                  const std::string& cx_file, int blocks, double tol_rate,
                                  const Tolerances& tol) {
    std::vector<Mat> h_list;
    for (const auto& f : h_files) h_list.push_back(load_matrix(f));
    Mat cx = cx_file.empty() ? Mat::identity(h_list[0].cols()) : load_matrix(cx_file);
    return build_scheme_kuser(h_list, cx, blocks, tol, tol_rate);
}

int run_multicast(CommonOpts& c, const std::vector<std::string>& h_files,
                  const std::string& cx_file, int blocks, double tol_rate) {
    MulticastScheme s = scheme_from_files(h_files, cx_file, blocks, tol_rate, c.tol);
    json rep = base_report("multicast", c,
                           {{"h", h_files},
                            {"cx", cx_file.empty() ? json() : json(cx_file)},
                            {"blocks", blocks},
                            {"tol_rate", tol_rate}});
    rep["scheme"] = scheme_report(s);
    emit(rep, c);
    return 0;
}

int run_rateless(CommonOpts& c, bool two_rate, bool three_rate, int channels, double rate) {
    const int modes = (two_rate ? 1 : 0) + (three_rate ? 1 : 0) + (channels > 0 ? 1 : 0);
    if (modes != 1)
        throw InvalidParams("pick exactly one of --two-rate, --three-rate, --channels");

    if (two_rate) {
        json rep = base_report("rateless", c, {{"two_rate", true}, {"rate", rate}});
        Mat v = two_rate_precoder(rate);
        rep["precoder"] = matrix_to_json(v);
        const double gain = std::exp2(rate / 4.0);
        rep["gains"] = {gain, gain};
        rep["alphas"] = rateless_alphas(2, rate);
        emit(rep, c);
        return 0;
    }
    if (three_rate) {
        json rep = base_report("rateless", c, {{"three_rate", true}, {"rate", rate}});
        ThreeRateFeasibility f = three_rate_feasible(rate);
        rep["feasible"] = f.feasible;
        rep["threshold"] = f.threshold;
        ThreeRateOffdiag d = three_rate_offdiag(rate);
        rep["x"] = d.x;
        rep["z"] = d.z;
        rep["w"] = d.w;
        rep["u"] = d.u;
        rep["R1"] = matrix_to_json(d.R1);
        rep["R2"] = matrix_to_json(d.R2);
        if (f.feasible) {
            PairJet pj = three_rate_pair_jet(rate);
            rep["U1"] = matrix_to_json(pj.U1);
            rep["U2"] = matrix_to_json(pj.U2);
            rep["V"] = matrix_to_json(pj.V);
        }
        emit(rep, c);
        return f.feasible ? 0 : 2;
    }
    json rep = base_report("rateless", c, {{"channels", channels}, {"rate", rate}});
    rep["alphas"] = rateless_alphas(channels, rate);
    json hs = json::array();
    for (const Mat& h : build_rateless_channels(channels, rate)) hs.push_back(matrix_to_json(h));
    rep["H"] = std::move(hs);
    emit(rep, c);
    return 0;
}

int run_simulate(CommonOpts& c, bool two_rate, double rate,
                 const std::vector<std::string>& h_files, const std::string& cx_file,
                 int blocks, double tol_rate, std::uint64_t trials) {
    MulticastScheme s;
    json config;
    if (two_rate) {
        std::vector<Mat> h = build_rateless_channels(2, rate);
        s = build_scheme_2user(h[0], h[1], Mat::identity(2), c.tol, tol_rate);
        config = {{"two_rate", true}, {"rate", rate}, {"trials", trials}};
    } else {
        if (h_files.size() < 2)
            throw InvalidParams("simulate needs --two-rate or at least two --h channels");
        s = scheme_from_files(h_files, cx_file, blocks, tol_rate, c.tol);
        config = {{"h", h_files},
                  {"cx", cx_file.empty() ? json() : json(cx_file)},
                  {"blocks", blocks},
                  {"trials", trials}};
    }
    json rep = base_report("simulate", c, std::move(config));
    SimReport sim = sic_simulate(s, trials, ensure_seed(c));
    rep["scheme"] = scheme_report(s);
    rep["trials"] = sim.trials;
    json streams = json::array();
    for (const StreamStat& st : sim.streams)
        streams.push_back({{"user", st.user},
                           {"stream", st.stream},
                           {"r_k", st.r_k},
                           {"rate_bits", st.rate_bits},
                           {"empirical_sinr", st.empirical_sinr},
                           {"empirical_rate_bits", st.empirical_rate_bits},
                           {"mse", st.mse}});
    rep["streams"] = std::move(streams);
    emit(rep, c);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"joint triangularization and multicast modulation toolbox"};
    app.require_subcommand(1);
    int exit_code = 0;

    // gmd
    CommonOpts c_gmd;
    std::string gmd_in;
    auto* cmd_gmd = app.add_subcommand("gmd", "flat-diagonal factorization of one matrix");
    cmd_gmd->add_option("--in", gmd_in, "input matrix")->required();
    add_common(cmd_gmd, c_gmd);
    cmd_gmd->callback([&]() { exit_code = run_gmd(c_gmd, gmd_in); });

    // jet
    CommonOpts c_jet;
    std::string jet_in1, jet_in2;
    auto* cmd_jet = app.add_subcommand("jet", "joint equal-diagonal triangularization of a pair");
    cmd_jet->add_option("--in1", jet_in1, "first matrix")->required();
    cmd_jet->add_option("--in2", jet_in2, "second matrix")->required();
    add_common(cmd_jet, c_jet);
    cmd_jet->callback([&]() { exit_code = run_jet(c_jet, jet_in1, jet_in2); });

    // kjet
    CommonOpts c_kjet;
    std::vector<std::string> kjet_files;
    auto* cmd_kjet =
        app.add_subcommand("kjet", "joint triangularization of two or three matrices");
    cmd_kjet->add_option("--g", kjet_files, "matrix file (repeat per user)")->required();
    add_common(cmd_kjet, c_kjet);
    cmd_kjet->callback([&]() { exit_code = run_kjet(c_kjet, kjet_files); });

    // exact2
    CommonOpts c_e2;
    std::string e2_in1, e2_in2;
    auto* cmd_e2 = app.add_subcommand(
        "exact2", "feasibility and construction of the exact two-matrix flattening");
    cmd_e2->add_option("--in1", e2_in1, "first matrix (real 2x2, det 1)")->required();
    cmd_e2->add_option("--in2", e2_in2, "second matrix (real 2x2, det 1)")->required();
    add_common(cmd_e2, c_e2);
    cmd_e2->callback([&]() { exit_code = run_exact2(c_e2, e2_in1, e2_in2); });

    // stgmd
    CommonOpts c_st;
    std::vector<std::string> st_files;
    int st_blocks = 4;
    bool st_norm = false;
    auto* cmd_st = app.add_subcommand("stgmd", "space-time flat factorization over N blocks");
    cmd_st->add_option("--in", st_files, "matrix file (repeat per user)")->required();
    cmd_st->add_option("--blocks", st_blocks, "number of channel uses N");
    cmd_st->add_flag("--normalize", st_norm, "rescale inputs to unit |det| first");
    add_common(cmd_st, c_st);
    cmd_st->callback([&]() { exit_code = run_stgmd(c_st, st_files, st_blocks, st_norm); });

    // multicast
    CommonOpts c_mc;
    std::vector<std::string> mc_h;
    std::string mc_cx;
    int mc_blocks = 4;
    double mc_tol_rate = 1e-6;
    auto* cmd_mc = app.add_subcommand("multicast", "design a common-message scheme");
    cmd_mc->add_option("--h", mc_h, "channel matrix file (repeat per user)")->required();
    cmd_mc->add_option("--cx", mc_cx, "input covariance (defaults to identity)");
    cmd_mc->add_option("--blocks", mc_blocks, "channel uses for the space-time route");
    cmd_mc->add_option("--tol-rate", mc_tol_rate, "allowed mutual-information mismatch");
    add_common(cmd_mc, c_mc);
    cmd_mc->callback(
        [&]() { exit_code = run_multicast(c_mc, mc_h, mc_cx, mc_blocks, mc_tol_rate); });

    // rateless
    CommonOpts c_rl;
    bool rl_two = false, rl_three = false;
    int rl_channels = 0;
    double rl_rate = 0.0;
    auto* cmd_rl = app.add_subcommand("rateless", "rateless transmission design and feasibility");
    cmd_rl->add_flag("--two-rate", rl_two, "two-split closed-form precoder");
    cmd_rl->add_flag("--three-rate", rl_three, "three-split feasibility and factors");
    cmd_rl->add_option("--channels", rl_channels, "emit the M staircase channels");
    cmd_rl->add_option("--rate", rl_rate, "total rate R in bits")->required();
    add_common(cmd_rl, c_rl);
    cmd_rl->callback(
        [&]() { exit_code = run_rateless(c_rl, rl_two, rl_three, rl_channels, rl_rate); });

    // simulate
    CommonOpts c_sim;
    bool sim_two = false;
    double sim_rate = 4.0;
    std::vector<std::string> sim_h;
    std::string sim_cx;
    int sim_blocks = 4;
    double sim_tol_rate = 1e-6;
    std::uint64_t sim_trials = 100000;
    auto* cmd_sim = app.add_subcommand("simulate", "Monte-Carlo SIC over a designed scheme");
    cmd_sim->add_flag("--two-rate", sim_two, "simulate the two-split scheme");
    cmd_sim->add_option("--rate", sim_rate, "rate R for --two-rate");
    cmd_sim->add_option("--h", sim_h, "channel matrix file (repeat per user)");
    cmd_sim->add_option("--cx", sim_cx, "input covariance (defaults to identity)");
    cmd_sim->add_option("--blocks", sim_blocks, "channel uses for the space-time route");
    cmd_sim->add_option("--tol-rate", sim_tol_rate, "allowed mutual-information mismatch");
    cmd_sim->add_option("--trials", sim_trials, "Monte-Carlo trials");
    add_common(cmd_sim, c_sim);
    cmd_sim->callback([&]() {
        exit_code = run_simulate(c_sim, sim_two, sim_rate, sim_h, sim_cx, sim_blocks,
                                 sim_tol_rate, sim_trials);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
