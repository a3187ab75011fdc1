#include "netmod/multicast.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "netmod/decomp.hpp"
#include "netmod/errors.hpp"
#include "netmod/exact2.hpp"
#include "netmod/matcore.hpp"
#include "netmod/rateless.hpp"
#include "netmod/rng.hpp"
#include "netmod/spacetime.hpp"

namespace netmod {

namespace {

void check_channel_dims(const Mat& h, const Mat& cx, const char* who) {
    if (!cx.square()) throw InvalidDims(std::string(who) + ": Cx must be square");
    if (h.cols() != cx.rows())
        throw DimMismatch(std::string(who) + ": channel width does not match Cx");
    if (h.rows() < 1) throw InvalidDims(std::string(who) + ": channel has no outputs");
}

void check_psd(const Mat& cx, const Tolerances& tol, const char* who) {
    EigResult eg = hermitian_eig(cx, tol);
    const double scale = std::max(max_abs(cx), 1.0);
    if (!eg.values.empty() && eg.values.front() < -tol.psd * scale)
        throw NotPSD(std::string(who) + ": Cx has a negative eigenvalue");
}

// det(G)^{1/n} for a positive-diagonal triangular factor; used to bring all
// users' factors to unit determinant before joint triangularization.
double det_root(const Mat& g) {
    double log_sum = 0.0;
    for (int k = 0; k < g.rows(); ++k) log_sum += std::log(g(k, k).real());
    return std::exp(log_sum / g.rows());
}

}  // namespace

double mutual_info(const Mat& h, const Mat& cx, const Tolerances& tol) {
    check_channel_dims(h, cx, "mutual_info");
    check_psd(cx, tol, "mutual_info");
    const int m = h.rows();
    Mat gram = Mat::identity(m) + h * cx * adjoint(h);
    const cplx d = det(gram);
    if (d.real() <= 0.0) throw NumericalBreakdown("mutual_info: non-positive determinant");
    return std::log2(d.real());
}

AugmentResult augment(const Mat& h, const Mat& cx, const Tolerances& tol) {
    check_channel_dims(h, cx, "augment");
    const int m = h.rows(), n = h.cols();
    Mat f = h * hermitian_sqrt(cx, tol);
    QrResult qr = qr_decompose(vstack(f, Mat::identity(n)), tol);

    // The triangular factor must carry exactly the channel's rate; this ties
    // the two independent computations of the same quantity together.
    double g_rate = 0.0;
    for (int k = 0; k < n; ++k) g_rate += 2.0 * std::log2(qr.R(k, k).real());
    const double c = mutual_info(h, cx, tol);
    if (std::abs(g_rate - c) > 1e-6 * std::max(1.0, std::abs(c)))
        throw NumericalBreakdown("augment: triangular factor lost rate");

    return {std::move(qr.R), submatrix(qr.Q, 0, 0, m, n)};
}

double scale_to_capacity(const Mat& h, const Mat& cx, double target_bits,
                         const Tolerances& tol) {
    if (target_bits < 0.0) throw InvalidParams("scale_to_capacity: negative target");
    if (target_bits == 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    int grow = 0;
    while (mutual_info(h * cplx(hi), cx, tol) < target_bits) {
        hi *= 2.0;
        if (++grow > 200) throw NoConvergence("scale_to_capacity: target unreachable");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mutual_info(h * cplx(mid), cx, tol) < target_bits)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

MulticastScheme build_scheme_2user(const Mat& h1, const Mat& h2, const Mat& cx,
                                   const Tolerances& tol, double tol_rate) {
    const double c1 = mutual_info(h1, cx, tol);
    const double c2 = mutual_info(h2, cx, tol);
    if (std::abs(c1 - c2) > tol_rate)
        throw RateMismatch("build_scheme_2user: users support different rates");

    AugmentResult a1 = augment(h1, cx, tol);
    AugmentResult a2 = augment(h2, cx, tol);
    JetResult jt = jet2(a1.G, a2.G, tol);

    MulticastScheme s;
    s.mode = SchemeMode::two_user_exact;
    s.n = h1.cols();
    s.blocks = 1;
    s.streams = s.n;
    s.capacity = 0.5 * (c1 + c2);
    s.sqrt_cx = hermitian_sqrt(cx, tol);
    s.V = jt.V;
    s.Qtilde = {std::move(a1.Qtilde), std::move(a2.Qtilde)};
    s.U = {std::move(jt.U1), std::move(jt.U2)};
    s.T = {std::move(jt.R1), std::move(jt.R2)};
    s.H = {h1, h2};
    for (int k = 0; k < s.streams; ++k) {
        const double r = std::min(s.T[0](k, k).real(), s.T[1](k, k).real());
        s.diag_gains.push_back(r);
        s.stream_rates.push_back(2.0 * std::log2(r));
    }
    return s;
}

namespace {

// Detects the three-split diagonal family among the unit-det ratios
// B1 = diag(s^4, s^-2, s^-2), B2 = diag(s, s, s^-2) and recovers R from s.
// Returns a negative value when the pattern is absent.
double detect_three_split_rate(const Mat& b1, const Mat& b2) {
    for (const Mat* b : {&b1, &b2})
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j && std::abs((*b)(i, j)) > 1e-9) return -1.0;
    const double s = b2(0, 0).real();
    if (!(s > 1.0 + 1e-9)) return -1.0;
    const double targets_b1[3] = {s * s * s * s, 1.0 / (s * s), 1.0 / (s * s)};
    const double targets_b2[3] = {s, s, 1.0 / (s * s)};
    for (int i = 0; i < 3; ++i) {
        if (std::abs(b1(i, i).real() - targets_b1[i]) > 1e-6 * targets_b1[i]) return -1.0;
        if (std::abs(b2(i, i).real() - targets_b2[i]) > 1e-6 * targets_b2[i]) return -1.0;
    }
    return 12.0 * std::log2(s);
}

}  // namespace

MulticastScheme build_scheme_kuser(const std::vector<Mat>& h_list, const Mat& cx, int N,
                                   const Tolerances& tol, double tol_rate) {
    const int K = static_cast<int>(h_list.size());
    if (K < 2) throw InvalidParams("build_scheme_kuser: need at least two users");
    if (K == 2) return build_scheme_2user(h_list[0], h_list[1], cx, tol, tol_rate);

    std::vector<double> rates;
    for (const Mat& h : h_list) rates.push_back(mutual_info(h, cx, tol));
    for (double r : rates)
        if (std::abs(r - rates[0]) > tol_rate)
            throw RateMismatch("build_scheme_kuser: users support different rates");

    const int n = h_list[0].cols();
    std::vector<AugmentResult> aug;
    std::vector<Mat> g_hat;
    for (const Mat& h : h_list) {
        if (h.cols() != n) throw DimMismatch("build_scheme_kuser: transmit dims differ");
        aug.push_back(augment(h, cx, tol));
        g_hat.push_back(aug.back().G * cplx(1.0 / det_root(aug.back().G)));
    }

    MulticastScheme s;
    s.n = n;
    s.capacity = rates[0];
    s.sqrt_cx = hermitian_sqrt(cx, tol);
    for (auto& a : aug) s.Qtilde.push_back(std::move(a.Qtilde));
    s.H = h_list;

    // Exact route: three real channels whose flattening feasibility holds get
    // a lossless two-block construction; factors come out real orthogonal.
    bool all_real = is_real(cx, tol.structural);
    for (const Mat& h : h_list) all_real = all_real && is_real(h, tol.structural);
    if (K == 3 && all_real) {
        Mat g3_inv = inverse(g_hat[2], tol);
        Mat b1 = g_hat[0] * g3_inv;
        Mat b2 = g_hat[1] * g3_inv;
        bool have = false;
        Mat u1, u2, v;
        if (n == 2) {
            try {
                Exact2GmdResult e = exact_2gmd(real_part(b1), real_part(b2), tol);
                u1 = std::move(e.U1);
                u2 = std::move(e.U2);
                v = std::move(e.V);
                have = true;
            } catch (const Infeasible&) {
            } catch (const DegenerateEqualDiagonal&) {
            } catch (const NumericalBreakdown&) {
            }
        } else if (n == 3) {
            const double r_est = detect_three_split_rate(b1, b2);
            if (r_est > 0.0 && three_rate_feasible(r_est).feasible) {
                PairJet pj = three_rate_pair_jet(r_est);
                u1 = std::move(pj.U1);
                u2 = std::move(pj.U2);
                v = std::move(pj.V);
                have = true;
            }
        }
        if (have) {
            QrResult qs = qr_decompose(solve(g_hat[2], v, tol), tol);
            std::vector<int> p = interleave_map(n);
            s.mode = SchemeMode::k_user_exact;
            s.blocks = 2;
            s.streams = 2 * n;
            s.U = {take_cols(realify(u1), p), take_cols(realify(u2), p),
                   take_cols(realify(v), p)};
            s.V = take_cols(realify(qs.Q), p);
            for (int i = 0; i < K; ++i)
                s.T.push_back(adjoint(s.U[i]) * block_apply(aug[i].G, s.V));
            for (int k = 0; k < s.streams; ++k) {
                double r = s.T[0](k, k).real();
                for (int i = 1; i < K; ++i) r = std::min(r, s.T[i](k, k).real());
                s.diag_gains.push_back(r);
                s.stream_rates.push_back(2.0 * std::log2(r));
            }
            return s;
        }
    }

    // Space-time route over N blocks on the det-normalized factors.
    SpaceTimeDecomp st = st_kgmd(g_hat, N, tol);
    s.mode = SchemeMode::k_user_spacetime;
    s.blocks = st.blocks;
    s.streams = st.retained;
    s.U = std::move(st.U_list);
    s.V = std::move(st.V);
    for (int i = 0; i < K; ++i)
        s.T.push_back(adjoint(s.U[i]) * block_apply(aug[i].G, s.V));
    for (int k = 0; k < s.streams; ++k) {
        double r = s.T[0](k, k).real();
        for (int i = 1; i < K; ++i) r = std::min(r, s.T[i](k, k).real());
        s.diag_gains.push_back(r);
        s.stream_rates.push_back(2.0 * std::log2(r));
    }
    return s;
}

Mat precode(const Mat& symbols, const MulticastScheme& scheme) {
    if (symbols.rows() != scheme.streams)
        throw DimMismatch("precode: symbol row count must equal stream count");
    return block_apply(scheme.sqrt_cx, scheme.V * symbols);
}

Mat receiver_front(const Mat& y_stack, const MulticastScheme& scheme, int user) {
    if (user < 0 || user >= static_cast<int>(scheme.U.size()))
        throw InvalidParams("receiver_front: no such user");
    const Mat& qt = scheme.Qtilde[static_cast<size_t>(user)];
    if (y_stack.rows() != qt.rows() * scheme.blocks)
        throw DimMismatch("receiver_front: receive stack has the wrong height");
    return adjoint(scheme.U[static_cast<size_t>(user)]) * block_apply(adjoint(qt), y_stack);
}

namespace {

// Row-major dense buffer for the tight simulation loops.
struct Dense {
    int rows = 0, cols = 0;
    std::vector<cplx> a;
    explicit Dense(const Mat& m) : rows(m.rows()), cols(m.cols()), a(m.rows() * m.cols()) {
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) a[static_cast<size_t>(i) * cols + j] = m(i, j);
    }
    void apply(const std::vector<cplx>& x, std::vector<cplx>& y) const {
        for (int i = 0; i < rows; ++i) {
            cplx acc = 0.0;
            const cplx* row = a.data() + static_cast<size_t>(i) * cols;
            for (int j = 0; j < cols; ++j) acc += row[j] * x[static_cast<size_t>(j)];
            y[static_cast<size_t>(i)] = acc;
        }
    }
};

struct ChunkAcc {
    std::vector<cplx> sxy;   // sum conj(x) * o, per (user, stream)
    std::vector<double> sxx; // sum |x|^2
    std::vector<double> soo; // sum |o|^2
};

int worker_count(std::uint64_t n_chunks) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("NETMOD_THREADS")) {
        const long v = std::atol(env);
        if (v >= 1) hw = static_cast<unsigned>(v);
    }
    return static_cast<int>(std::min<std::uint64_t>(hw, n_chunks));
}

}  // namespace

SimReport sic_simulate(const MulticastScheme& scheme, std::uint64_t trials, std::uint64_t seed) {
    if (trials < 1) throw InvalidParams("sic_simulate: need at least one trial");
    const int S = scheme.streams;
    const int K = static_cast<int>(scheme.U.size());

    // Per-user end-to-end maps: symbols -> front-end outputs through the true
    // channel, and receiver noise -> front-end outputs.
    std::vector<Dense> a_eff, n_map, t_upper;
    std::vector<int> noise_dims, noise_offsets;
    int noise_cursor = S;  // symbol draws occupy counter lanes [0, S)
    for (int i = 0; i < K; ++i) {
        const Mat& u = scheme.U[static_cast<size_t>(i)];
        const Mat& qt = scheme.Qtilde[static_cast<size_t>(i)];
        Mat per_use = adjoint(qt) * scheme.H[static_cast<size_t>(i)] * scheme.sqrt_cx;
        a_eff.emplace_back(adjoint(u) * block_apply(per_use, scheme.V));
        n_map.emplace_back(adjoint(u) * block_extend(adjoint(qt), scheme.blocks));
        Mat tu = scheme.T[static_cast<size_t>(i)];
        for (int k = 0; k < S; ++k) tu(k, k) = 0.0;
        t_upper.emplace_back(tu);
        noise_dims.push_back(qt.rows() * scheme.blocks);
        noise_offsets.push_back(noise_cursor);
        noise_cursor += noise_dims.back();
    }

    constexpr std::uint64_t kChunk = 4096;
    const std::uint64_t n_chunks = (trials + kChunk - 1) / kChunk;
    std::vector<ChunkAcc> partial(n_chunks);
    for (auto& p : partial) {
        p.sxy.assign(static_cast<size_t>(K) * S, cplx(0.0));
        p.sxx.assign(static_cast<size_t>(K) * S, 0.0);
        p.soo.assign(static_cast<size_t>(K) * S, 0.0);
    }

    std::atomic<std::uint64_t> next{0};
    auto run = [&]() {
        std::vector<cplx> x(S), y(S), o(S), cancel(S);
        std::vector<cplx> z(static_cast<size_t>(*std::max_element(noise_dims.begin(), noise_dims.end())));
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) break;
            ChunkAcc& acc = partial[c];
            const std::uint64_t t_end = std::min(trials, (c + 1) * kChunk);
            for (std::uint64_t t = c * kChunk; t < t_end; ++t) {
                for (int k = 0; k < S; ++k) x[static_cast<size_t>(k)] = rng_cnormal(seed, t, k);
                for (int i = 0; i < K; ++i) {
                    const int nd = noise_dims[static_cast<size_t>(i)];
                    for (int j = 0; j < nd; ++j)
                        z[static_cast<size_t>(j)] =
                            rng_cnormal(seed, t, noise_offsets[static_cast<size_t>(i)] + j);
                    a_eff[static_cast<size_t>(i)].apply(x, y);
                    n_map[static_cast<size_t>(i)].apply(z, o);  // o holds the noise part
                    for (int k = 0; k < S; ++k) y[static_cast<size_t>(k)] += o[static_cast<size_t>(k)];
                    // genie-aided back-substitution: later streams are known
                    t_upper[static_cast<size_t>(i)].apply(x, cancel);
                    for (int k = 0; k < S; ++k) {
                        const cplx ok = y[static_cast<size_t>(k)] - cancel[static_cast<size_t>(k)];
                        const size_t slot = static_cast<size_t>(i) * S + k;
                        acc.sxy[slot] += std::conj(x[static_cast<size_t>(k)]) * ok;
                        acc.sxx[slot] += std::norm(x[static_cast<size_t>(k)]);
                        acc.soo[slot] += std::norm(ok);
                    }
                }
            }
        }
    };

    const int n_workers = worker_count(n_chunks);
    if (n_workers <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(run);
        for (auto& th : pool) th.join();
    }

    // Chunk-ordered reduction keeps the result independent of thread layout.
    ChunkAcc total;
    total.sxy.assign(static_cast<size_t>(K) * S, cplx(0.0));
    total.sxx.assign(static_cast<size_t>(K) * S, 0.0);
    total.soo.assign(static_cast<size_t>(K) * S, 0.0);
    for (const auto& p : partial)
        for (size_t j = 0; j < total.sxy.size(); ++j) {
            total.sxy[j] += p.sxy[j];
            total.sxx[j] += p.sxx[j];
            total.soo[j] += p.soo[j];
        }

    SimReport rep;
    rep.trials = trials;
    rep.seed = seed;
    for (int i = 0; i < K; ++i)
        for (int k = 0; k < S; ++k) {
            const size_t slot = static_cast<size_t>(i) * S + k;
            StreamStat st;
            st.user = i;
            st.stream = k;
            st.r_k = scheme.T[static_cast<size_t>(i)](k, k).real();
            st.rate_bits = 2.0 * std::log2(st.r_k);
            const double sxx = total.sxx[slot];
            const cplx a_hat = total.sxy[slot] / sxx;
            double p_res = total.soo[slot] - std::norm(total.sxy[slot]) / sxx;
            p_res = std::max(p_res, 1e-300);
            st.mse = p_res / static_cast<double>(trials);
            st.empirical_sinr = std::norm(a_hat) * sxx / p_res;
            st.empirical_rate_bits = std::log2(1.0 + st.empirical_sinr);
            rep.streams.push_back(st);
        }
    return rep;
}

}  // namespace netmod
