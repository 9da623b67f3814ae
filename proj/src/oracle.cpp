#include "volput/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include "volput/pricing.hpp"

namespace volput::oracle {

namespace {

constexpr double kSetTol = 1e-6;  // obstacle-contact classification tolerance

struct Stencil {
    std::vector<double> lo, di, hi;  // interior rows of the discretized L
};

// Non-uniform central differences; per-node upwind fallback keeps the
// off-diagonal coefficients nonnegative (monotone scheme).
Stencil discretize(const ModelParams& params, const std::vector<double>& x) {
    const std::size_t n = x.size();
    Stencil st;
    st.lo.resize(n - 2);
    st.di.resize(n - 2);
    st.hi.resize(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
        const double mu = params.alpha * x[i] - params.beta * x[i] * x[i];
        const double s2 = params.k * params.k * x[i] * x[i] * x[i];
        const double c_lo = s2 / (hm * (hm + hp));
        const double c_di = -s2 / (hm * hp);
        const double c_hi = s2 / (hp * (hm + hp));
        double lo = c_lo + mu * (-hp / (hm * (hm + hp)));
        double hi = c_hi + mu * (hm / (hp * (hm + hp)));
        double di = c_di + mu * ((hp - hm) / (hm * hp)) - params.r;
        if (lo < 0.0 || hi < 0.0) {
            const double up_lo = mu < 0.0 ? -mu / hm : 0.0;
            const double up_hi = mu > 0.0 ? mu / hp : 0.0;
            lo = c_lo + up_lo;
            hi = c_hi + up_hi;
            di = c_di - up_lo - up_hi - params.r;
        }
        st.lo[i - 1] = lo;
        st.di[i - 1] = di;
        st.hi[i - 1] = hi;
    }
    return st;
}

}  // namespace

Grid make_log_grid(const ModelParams& params, int n, std::optional<double> x_min,
                   std::optional<double> x_max) {
    const double lo = x_min.value_or(1e-3);
    const double hi = x_max.value_or(std::max(10.0, 20.0 * params.strike_K));
    if (n < 200) throw std::invalid_argument("make_log_grid: n must be >= 200");
    if (!(lo > 0.0) || !(hi > std::max(3.0 * params.strike_K, 5.0))) {
        throw std::invalid_argument("make_log_grid: requires x_min > 0 and x_max > max(3K, 5)");
    }
    Grid g{{}, lo, hi, n};
    g.nodes.resize(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) g.nodes[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
    return g;
}

GridSolution solve_dynkin_grid(const ModelParams& params, const Grid& grid, GridMode mode,
                               const PsorConfig& psor) {
    model::validate(params);
    const auto& x = grid.nodes;
    const std::size_t n = x.size();
    const auto pay = pricing::payoffs(params);
    const Stencil st = discretize(params, x);

    // In barrier mode the node nearest K is pinned to the rebate, so the grid
    // must place a node at K exactly.
    std::size_t i_barrier = 0;
    std::vector<double> xs(x);
    if (mode == GridMode::KnockoutBarrier) {
        i_barrier = static_cast<std::size_t>(
            std::min_element(xs.begin(), xs.end(),
                             [&](double a, double b) {
                                 return std::abs(a - params.strike_K) <
                                        std::abs(b - params.strike_K);
                             }) -
            xs.begin());
        xs[i_barrier] = params.strike_K;
    }
    const Stencil stb = (mode == GridMode::KnockoutBarrier) ? discretize(params, xs) : st;

    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = pay.g1(xs[i]);

    // Far-field closure. Every admissible value function approaches a multiple
    // of the bounded basis solution, so a Robin condition matched to it,
    // v'(x_max) = (phi1'/phi1)(x_max) * v(x_max), avoids the domain-truncation
    // error a plain zero-slope copy injects (that error decays inward only as
    // the growing mode and stalls grid refinement). When the basis degenerates
    // the closure falls back to a second-order zero-slope condition.
    double rho = 0.0;
    try {
        const auto far = model::phi_basis(params, xs[n - 1]);
        rho = far.dphi1 / far.phi1;
    } catch (const std::domain_error&) {
    }
    const double ha = xs[n - 2] - xs[n - 3];
    const double hb = xs[n - 1] - xs[n - 2];
    const double w_c = hb / (ha * (ha + hb));
    const double w_b = -(ha + hb) / (ha * hb);
    const double w_a = (ha + 2.0 * hb) / (hb * (ha + hb));

    const bool has_upper = (mode == GridMode::DynkinGame);
    int sweeps = 0;
    double update = 0.0;
    for (; sweeps < psor.max_sweeps; ++sweeps) {
        update = 0.0;
        v[0] = pay.g1(xs[0]);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (mode == GridMode::KnockoutBarrier && i == i_barrier) {
                const double diff = std::abs(params.delta - v[i]);
                if (diff > update) update = diff;
                v[i] = params.delta;
                continue;
            }
            const double target = -(stb.lo[i - 1] * v[i - 1] + stb.hi[i - 1] * v[i + 1]) /
                                  stb.di[i - 1];
            double w = v[i] + psor.omega * (target - v[i]);
            const double floor = pay.g1(xs[i]);
            if (w < floor) w = floor;
            if (has_upper) {
                const double cap = pay.g2(xs[i]);
                if (w > cap) w = cap;
            }
            const double diff = std::abs(w - v[i]);
            if (diff > update) update = diff;
            v[i] = w;
        }
        double far_v = (-w_b * v[n - 2] - w_c * v[n - 3]) / (w_a - rho);
        const double far_floor = pay.g1(xs[n - 1]);
        if (far_v < far_floor) far_v = far_floor;
        if (has_upper) {
            const double far_cap = pay.g2(xs[n - 1]);
            if (far_v > far_cap) far_v = far_cap;
        }
        const double diff = std::abs(far_v - v[n - 1]);
        if (diff > update) update = diff;
        v[n - 1] = far_v;
        if (update < psor.tol) break;
    }
    if (update >= psor.tol) {
        throw std::runtime_error("solve_dynkin_grid: PSOR did not converge in " +
                                 std::to_string(psor.max_sweeps) +
                                 " sweeps (final update " + std::to_string(update) + ")");
    }

    GridSolution out{grid, std::move(v), {}, {}, sweeps + 1, update, params, mode};
    out.grid.nodes = xs;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(out.values[i] - pay.g1(xs[i])) <= kSetTol) {
            out.exercise_set.push_back(static_cast<int>(i));
        } else if (has_upper && std::abs(out.values[i] - pay.g2(xs[i])) <= kSetTol) {
            out.cancel_set.push_back(static_cast<int>(i));
        } else if (mode == GridMode::KnockoutBarrier && i == i_barrier) {
            out.cancel_set.push_back(static_cast<int>(i));
        }
    }
    return out;
}

double GridSolution::value_at(double x) const {
    const auto& nodes = grid.nodes;
    if (x <= nodes.front()) return values.front();
    if (x >= nodes.back()) return values.back();
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - nodes.begin());
    const double t = (x - nodes[i - 1]) / (nodes[i] - nodes[i - 1]);
    return (1.0 - t) * values[i - 1] + t * values[i];
}

void GridSolution::write_csv(std::ostream& out) const {
    const auto pay = pricing::payoffs(params);
    out << "node,value,g1,g2,region\n";
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        const double x = grid.nodes[i];
        const char* region = "continuation";
        if (std::abs(values[i] - pay.g1(x)) <= kSetTol) region = "exercise";
        else if (std::abs(values[i] - pay.g2(x)) <= kSetTol) region = "cancel";
        out << x << ',' << values[i] << ',' << pay.g1(x) << ',' << pay.g2(x) << ','
            << region << '\n';
    }
}

double boundary_from_grid(const GridSolution& solution) {
    if (solution.exercise_set.empty()) {
        throw std::runtime_error("boundary_from_grid: empty exercise set");
    }
    // Exercise region is a left interval; take its last node and extrapolate
    // value - g1 from the two nodes above back to zero.
    int last = solution.exercise_set.front();
    for (int idx : solution.exercise_set) last = std::max(last, idx);
    const auto& x = solution.grid.nodes;
    const auto pay = pricing::payoffs(solution.params);
    const std::size_t i = static_cast<std::size_t>(last);
    if (i + 2 >= x.size()) return x[i];
    const double d1 = solution.values[i + 1] - pay.g1(x[i + 1]);
    const double d2 = solution.values[i + 2] - pay.g1(x[i + 2]);
    if (d2 <= d1 || d1 <= 0.0) return x[i];
    const double s = x[i + 1] - d1 * (x[i + 2] - x[i + 1]) / (d2 - d1);
    return std::clamp(s, x[i], x[i + 1]);
}

McEstimate mc_stopping_value(const ModelParams& params, const PathConfig& config,
                             double exercise_s, std::optional<double> barrier_K,
                             double rebate) {
    model::validate(params);
    if (!(exercise_s > 0.0) || !(exercise_s < config.x0)) {
        throw std::invalid_argument("mc_stopping_value: requires 0 < exercise_s < x0");
    }
    if (barrier_K && !(config.x0 < *barrier_K)) {
        throw std::invalid_argument("mc_stopping_value: requires x0 < barrier_K");
    }
    if (!(config.dt > 0.0) || config.n_paths < 1 || !(config.horizon >= config.dt)) {
        throw std::invalid_argument("mc_stopping_value: invalid PathConfig");
    }

    const model::ReciprocalCirStepper stepper(params);
    const double y0 = 1.0 / config.x0;
    const double y_exercise = 1.0 / exercise_s;                    // upward crossing in y
    const double y_cancel = barrier_K ? 1.0 / *barrier_K : -1.0;   // downward crossing
    const double exercise_payoff = params.strike_K - exercise_s;
    const auto n_steps = static_cast<std::size_t>(std::llround(config.horizon / config.dt));

    struct BlockResult {
        double sum = 0.0, sum_sq = 0.0;
        std::int64_t truncated = 0;
    };

    const auto run_block = [&](int begin, int end) {
        BlockResult res;
        for (int p = begin; p < end; ++p) {
            std::mt19937_64 eng(model::path_seed(config.seed, static_cast<std::uint64_t>(p)));
            std::normal_distribution<double> normal(0.0, 1.0);
            double y = y0;
            double payoff = 0.0;
            bool stopped = false;
            for (std::size_t i = 0; i < n_steps; ++i) {
                const double yn = stepper.step(y, normal(eng), config.dt);
                const double t0 = static_cast<double>(i) * config.dt;
                const bool hit_ex = yn >= y_exercise;
                const bool hit_ca = barrier_K && yn <= y_cancel;
                if (hit_ex || hit_ca) {
                    const double th_ex =
                        hit_ex ? t0 + config.dt * std::clamp((y_exercise - y) / (yn - y), 0.0, 1.0)
                               : std::numeric_limits<double>::infinity();
                    const double th_ca =
                        hit_ca ? t0 + config.dt * std::clamp((y_cancel - y) / (yn - y), 0.0, 1.0)
                               : std::numeric_limits<double>::infinity();
                    payoff = (th_ex <= th_ca) ? exercise_payoff * std::exp(-params.r * th_ex)
                                              : rebate * std::exp(-params.r * th_ca);
                    stopped = true;
                    break;
                }
                y = yn;
            }
            if (!stopped) ++res.truncated;  // horizon contribution 0
            res.sum += payoff;
            res.sum_sq += payoff * payoff;
        }
        return res;
    };

    const int block = 8192;
    const int n_blocks = (config.n_paths + block - 1) / block;
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<BlockResult> partial(static_cast<std::size_t>(n_blocks));
    if (workers <= 1 || n_blocks == 1) {
        for (int bidx = 0; bidx < n_blocks; ++bidx) {
            partial[bidx] = run_block(bidx * block, std::min((bidx + 1) * block, config.n_paths));
        }
    } else {
        std::vector<std::future<void>> tasks;
        std::atomic<int> next{0};
        for (unsigned w = 0; w < workers; ++w) {
            tasks.push_back(std::async(std::launch::async, [&] {
                for (int bidx = next.fetch_add(1); bidx < n_blocks; bidx = next.fetch_add(1)) {
                    partial[bidx] =
                        run_block(bidx * block, std::min((bidx + 1) * block, config.n_paths));
                }
            }));
        }
        for (auto& t : tasks) t.get();
    }

    // Block partials combined in block order: the result does not depend on
    // the thread count.
    BlockResult total;
    for (const auto& r : partial) {
        total.sum += r.sum;
        total.sum_sq += r.sum_sq;
        total.truncated += r.truncated;
    }
    const double n = static_cast<double>(config.n_paths);
    const double truncated_fraction = static_cast<double>(total.truncated) / n;
    if (truncated_fraction > 0.05) {
        throw std::runtime_error("mc_stopping_value: over 5% of paths reached the horizon "
                                 "(truncation bias); extend horizon");
    }
    const double mean = total.sum / n;
    const double var = std::max(0.0, (total.sum_sq - n * mean * mean) / (n - 1.0));
    return {mean, std::sqrt(var / n), config.n_paths, true};
}

}  // namespace volput::oracle
