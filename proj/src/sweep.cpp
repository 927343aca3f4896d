#include "bregcr/sweep.hpp"

#include "bregcr/errors.hpp"
#include "bregcr/serialize.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace bregcr {

namespace {

using nlohmann::json;

const std::pair<Quantity, const char*> quantity_names[] = {
    {Quantity::mmse_exact, "mmse-exact"},   {Quantity::lmmse, "lmmse"},
    {Quantity::cr_mmse, "cr-mmse"},         {Quantity::bregman_exact, "bregman-exact"},
    {Quantity::cr_linear, "cr-linear"},     {Quantity::cr_universal, "cr-universal"},
    {Quantity::mc_risk, "mc-risk"},
};

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

// Walks a JSON object, remembering the path for error messages and rejecting
// keys nobody asked for.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }
    std::string at(const std::string& key) const { return path_ + "." + key; }
    const json& raw(const std::string& key) {
        if (!has(key)) fail(at(key), "missing");
        return j_.at(key);
    }
    Node object(const std::string& key) { return Node(raw(key), at(key)); }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) fail(at(key), "expected a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
    std::string text(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) fail(at(key), "expected a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) { return has(key) ? text(key) : fallback; }
    std::uint64_t count(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number_unsigned()) fail(at(key), "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) fail(at(it.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class E>
E choose(const std::string& path, const std::string& value, std::initializer_list<std::pair<const char*, E>> options) {
    std::string allowed;
    for (const auto& [name, e] : options) {
        if (value == name) return e;
        allowed += allowed.empty() ? name : std::string(", ") + name;
    }
    fail(path, "'" + value + "' is not one of " + allowed);
}

Quantity parse_quantity(const std::string& path, const std::string& s) {
    for (const auto& [q, name] : quantity_names)
        if (s == name) return q;
    std::string allowed;
    for (const auto& [q, name] : quantity_names) allowed += allowed.empty() ? name : std::string(", ") + name;
    fail(path, "'" + s + "' is not one of " + allowed);
}

std::vector<double> linspace(double from, double to, int points) {
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = points == 1 ? from : from + (to - from) * k / (points - 1);
    if (points > 1) g.back() = to;
    return g;
}

std::vector<double> integer_range(int from, int to, int step) {
    std::vector<double> g;
    for (int v = from; v <= to; v += step) g.push_back(v);
    return g;
}

Generator mc_generator(const RunConfig& c) {
    if (!c.generator.empty()) return Generator::by_name(c.generator, 1);
    return c.model == Model::gamma_poisson ? Generator::neg_entropy() : Generator::binary_logit();
}

SweepRow bound_row(double v, Quantity q, const BoundValue& b) {
    SweepRow r{v, q, b.value, b.valid, std::nullopt};
    if (b.std_error != 0.0) r.std_error = b.std_error;
    return r;
}

SweepRow compute(const RunConfig& c, double v, Quantity q) {
    const Prior prior = c.prior();
    const Channel ch = c.channel_at(v);
    const bool poisson = c.model == Model::gamma_poisson;
    switch (q) {
    case Quantity::mmse_exact: return {v, q, exact_mmse(prior, ch, c.moment_mode).value, true, std::nullopt};
    case Quantity::lmmse: return {v, q, lmmse_value(prior, ch, c.moment_mode), true, std::nullopt};
    case Quantity::cr_mmse: return bound_row(v, q, classic_cr_mmse(prior, ch, c.score_mode));
    case Quantity::bregman_exact: {
        const Generator gen = poisson ? Generator::neg_entropy() : Generator::binary_logit();
        return {v, q, exact_bregman_risk(gen, prior, ch), true, std::nullopt};
    }
    case Quantity::cr_linear: {
        const LinearCoefficients lc = lmmse_coefficients(prior, ch, c.moment_mode);
        if (poisson) return bound_row(v, q, cr_linear_poisson(prior, std::get<PoissonChannel>(ch), lc.c, lc.d, c.delta_order));
        BinomialBoundOptions opt;
        opt.score = c.score_mode;
        opt.order = c.delta_order;
        return bound_row(v, q,
                         cr_linear_binomial(std::get<BetaPrior>(prior), std::get<BinomialChannel>(ch), lc.c, lc.d, opt));
    }
    case Quantity::cr_universal:
        if (poisson)
            return bound_row(v, q,
                             universal_cr_poisson(std::get<GammaPrior>(prior), std::get<PoissonChannel>(ch), c.delta_order));
        return bound_row(v, q,
                         universal_cr_binomial(std::get<BetaPrior>(prior), std::get<BinomialChannel>(ch), c.score_mode,
                                               c.delta_order));
    case Quantity::mc_risk: {
        const Generator gen = mc_generator(c);
        PosteriorMode mode = PosteriorMode::closed_form;
        if (const auto* bc = std::get_if<BinomialChannel>(&ch); bc && bc->a < 1.0 && bc->n > 1)
            mode = PosteriorMode::quadrature;
        const EstimatorSpec est = EstimatorSpec::posterior_mean(mode, interior_clamp(gen));
        const RiskEstimate r = monte_carlo_risk(gen, prior, ch, est, c.mc->n_samples, c.mc->seed);
        return {v, q, r.mean, true, r.std_error};
    }
    }
    throw UnsupportedError("unknown quantity");
}

std::string grid_label(const RunConfig& c, double v) { return to_string(c.variable) + " = " + format_number(v); }

// For a < 1 and n >= 2 the linear posterior-mean formula is not the posterior
// mean; report how far it drifts from quadrature over the grid.
std::optional<std::string> linear_posterior_note(const RunConfig& c) {
    if (c.model != Model::beta_binomial) return std::nullopt;
    if (std::find(c.quantities.begin(), c.quantities.end(), Quantity::mmse_exact) == c.quantities.end())
        return std::nullopt;
    double worst = 0.0, where = 0.0;
    for (double v : c.grid) {
        const auto bc = std::get<BinomialChannel>(c.channel_at(v));
        if (!(bc.a < 1.0 && bc.n > 1)) continue;
        for (long y = 0; y <= bc.n; ++y) {
            const double d = std::abs(posterior_mean(c.prior(), bc, y) -
                                      posterior_mean(c.prior(), bc, y, PosteriorMode::quadrature));
            if (d > worst) {
                worst = d;
                where = v;
            }
        }
    }
    if (worst == 0.0) return std::nullopt;
    return "mmse-exact uses the linear posterior mean for a < 1; it deviates from the quadrature posterior mean by up "
           "to " +
           format_number(worst) + " (at " + grid_label(c, where) + ")";
}

}  // namespace

std::string to_string(Model m) { return m == Model::gamma_poisson ? "gamma-poisson" : "beta-binomial"; }
std::string to_string(SweepVariable v) { return v == SweepVariable::a ? "a" : "n"; }
std::string to_string(Quantity q) {
    for (const auto& [qq, name] : quantity_names)
        if (qq == q) return name;
    return "?";
}

Prior RunConfig::prior() const {
    if (model == Model::gamma_poisson) return make_gamma(prior_p1, prior_p2);
    return make_beta(prior_p1, prior_p2);
}

Channel RunConfig::channel_at(double v) const {
    const double aa = variable == SweepVariable::a ? v : a;
    const int nn = variable == SweepVariable::n ? static_cast<int>(v) : n;
    if (model == Model::gamma_poisson) return make_poisson(aa);
    return make_binomial(nn, aa);
}

void validate(const RunConfig& c) {
    try {
        validate(c.prior());
    } catch (const DomainError& e) {
        fail("$.prior", e.what());
    }
    if (c.grid.empty()) fail("$.sweep.grid", "grid must not be empty");
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
        const std::string p = "$.sweep.grid[" + std::to_string(i) + "]";
        const double v = c.grid[i];
        if (!std::isfinite(v)) fail(p, "must be finite");
        if (i > 0 && !(v > c.grid[i - 1])) fail(p, "grid must be strictly increasing");
        if (c.variable == SweepVariable::n && (v < 1.0 || v != std::floor(v) || v > 1e6))
            fail(p, "n must be an integer in [1, 1e6]");
        try {
            validate(c.channel_at(v));
        } catch (const DomainError& e) {
            fail(p, e.what());
        }
    }
    if (c.model == Model::gamma_poisson && c.variable == SweepVariable::n)
        fail("$.sweep.variable", "the gamma-poisson model has no n to sweep");
    if (c.quantities.empty()) fail("$.quantities", "at least one quantity is required");
    std::set<Quantity> seen;
    for (std::size_t i = 0; i < c.quantities.size(); ++i)
        if (!seen.insert(c.quantities[i]).second)
            fail("$.quantities[" + std::to_string(i) + "]", "duplicate quantity " + to_string(c.quantities[i]));
    if (seen.count(Quantity::mc_risk)) {
        if (!c.mc) fail("$.mc.seed", "a seed is required when mc-risk is requested (config or BREGCR_SEED)");
        if (c.mc->n_samples < 100) fail("$.mc.n_samples", "at least 100 samples are required");
    }
    if (!c.generator.empty()) {
        try {
            Generator::by_name(c.generator, 1);
        } catch (const DomainError& e) {
            fail("$.generator", e.what());
        }
    }
    if (c.output_path.empty()) fail("$.output.path", "must not be empty");
}

RunConfig parse_config(const json& j, std::optional<std::uint64_t> default_seed) {
    RunConfig c;
    Node root(j, "$");
    c.model = choose<Model>("$.model", root.text("model"),
                            {{"gamma-poisson", Model::gamma_poisson}, {"beta-binomial", Model::beta_binomial}});
    {
        Node p = root.object("prior");
        c.prior_p1 = p.number("alpha");
        c.prior_p2 = c.model == Model::gamma_poisson ? p.number("theta") : p.number("beta");
        p.finish();
    }
    if (root.has("channel")) {
        Node ch = root.object("channel");
        c.a = ch.number("a", 1.0);
        const double n = ch.number("n", 1.0);
        if (n < 1.0 || n != std::floor(n) || n > 1e6) fail(ch.at("n"), "n must be an integer in [1, 1e6]");
        c.n = static_cast<int>(n);
        ch.finish();
    }
    {
        Node s = root.object("sweep");
        c.variable = choose<SweepVariable>(s.at("variable"), s.text("variable"),
                                           {{"a", SweepVariable::a}, {"n", SweepVariable::n}});
        const bool has_grid = s.has("grid");
        const bool has_range = s.has("range");
        if (has_grid == has_range) fail(s.at("grid"), "give exactly one of grid or range");
        if (has_grid) {
            const json& g = s.raw("grid");
            if (!g.is_array()) fail(s.at("grid"), "expected an array");
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (!g[i].is_number()) fail(s.at("grid") + "[" + std::to_string(i) + "]", "expected a number");
                c.grid.push_back(g[i].get<double>());
            }
        } else {
            Node r = s.object("range");
            const double from = r.number("from"), to = r.number("to");
            const auto points = r.count("points");
            if (points < 1 || points > 1000000) fail(r.at("points"), "points must be in 1..1000000");
            r.finish();
            c.grid = linspace(from, to, static_cast<int>(points));
            if (c.variable == SweepVariable::n)
                for (double& v : c.grid) v = std::round(v);
        }
        s.finish();
    }
    {
        const json& q = root.raw("quantities");
        if (!q.is_array()) fail("$.quantities", "expected an array");
        for (std::size_t i = 0; i < q.size(); ++i) {
            const std::string p = "$.quantities[" + std::to_string(i) + "]";
            if (!q[i].is_string()) fail(p, "expected a string");
            c.quantities.push_back(parse_quantity(p, q[i].get<std::string>()));
        }
    }
    if (root.has("mc")) {
        Node m = root.object("mc");
        MonteCarloSettings s;
        if (m.has("n_samples")) s.n_samples = m.count("n_samples");
        if (m.has("seed")) {
            s.seed = m.count("seed");
            c.mc = s;
        } else if (default_seed) {
            s.seed = *default_seed;
            c.mc = s;
        }
        m.finish();
    } else if (default_seed) {
        c.mc = MonteCarloSettings{100000, *default_seed};
    }
    if (root.has("modes")) {
        Node m = root.object("modes");
        if (m.has("moment"))
            c.moment_mode = choose<MomentMode>(m.at("moment"), m.text("moment"),
                                               {{"corrected", MomentMode::corrected},
                                                {"paper-verbatim", MomentMode::paper_verbatim}});
        if (m.has("score"))
            c.score_mode = choose<ScoreMode>(m.at("score"), m.text("score"),
                                             {{"corrected", ScoreMode::corrected},
                                              {"paper-verbatim", ScoreMode::paper_verbatim}});
        if (m.has("delta_order"))
            c.delta_order = choose<DeltaArgumentOrder>(m.at("delta_order"), m.text("delta_order"),
                                                       {{"printed", DeltaArgumentOrder::printed},
                                                        {"swapped", DeltaArgumentOrder::swapped}});
        m.finish();
    }
    c.generator = root.text("generator", "");
    if (root.has("output")) {
        Node o = root.object("output");
        c.output_path = o.text("path", "-");
        c.format = choose<OutputFormat>(o.at("format"), o.text("format", "csv"),
                                        {{"csv", OutputFormat::csv}, {"json", OutputFormat::json}});
        o.finish();
    }
    root.finish();
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path, std::optional<std::uint64_t> default_seed) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(j, default_seed);
}

bool is_sweep_preset(const std::string& name) {
    return name == "fig4" || name == "fig6" || name == "fig7" || name == "fig8";
}

RunConfig preset_config(const std::string& name, std::optional<std::uint64_t> default_seed) {
    RunConfig c;
    if (name == "fig4" || name == "fig6") {
        c.model = Model::gamma_poisson;
        c.prior_p1 = 2.1;
        c.prior_p2 = 3.0;
        c.variable = SweepVariable::a;
        c.grid = linspace(0.0, 15.0, 100);
        if (name == "fig4") {
            c.quantities = {Quantity::mmse_exact, Quantity::cr_mmse};
        } else {
            c.quantities = {Quantity::mmse_exact, Quantity::cr_mmse, Quantity::bregman_exact, Quantity::cr_linear};
        }
    } else if (name == "fig7") {
        c.model = Model::beta_binomial;
        c.prior_p1 = 3.0;
        c.prior_p2 = 2.5;
        c.a = 0.8;
        c.variable = SweepVariable::n;
        c.grid = integer_range(1, 100, 1);
        c.quantities = {Quantity::mmse_exact, Quantity::cr_mmse};
        // The published curves follow the printed second moment and score.
        c.moment_mode = MomentMode::paper_verbatim;
        c.score_mode = ScoreMode::paper_verbatim;
    } else if (name == "fig8") {
        c.model = Model::beta_binomial;
        c.prior_p1 = 3.0;
        c.prior_p2 = 5.0;
        c.a = 1.0;
        c.variable = SweepVariable::n;
        c.grid = integer_range(1, 91, 10);
        c.quantities = {Quantity::bregman_exact, Quantity::cr_linear, Quantity::cr_universal, Quantity::mc_risk};
        c.mc = MonteCarloSettings{100000, default_seed.value_or(20240607)};
        c.notes.push_back(
            "fig8: bregman-exact at n = 1 is the exact conjugate-posterior risk 0.0878463; the published curve "
            "starts at 0.0977901, which these parameters do not reproduce");
        c.notes.push_back("fig8: the published bound curves (0.0109038 and 0.0083203 at n = 1) are not reproduced "
                          "either; cr-linear and cr-universal are the closed forms for these parameters");
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected fig2, fig4, fig6, fig7 or fig8)");
    }
    validate(c);
    return c;
}

SweepError::SweepError(Quantity q, double at, const std::string& what)
    : Error(to_string(q) + " at " + format_number(at) + ": " + what), quantity_(q) {}

SweepResult run_sweep(const RunConfig& config) {
    validate(config);
    const std::size_t nq = config.quantities.size();
    std::vector<SweepRow> cells(config.grid.size() * nq);
    std::vector<std::size_t> closed, mc;
    for (std::size_t i = 0; i < cells.size(); ++i)
        (config.quantities[i % nq] == Quantity::mc_risk ? mc : closed).push_back(i);

    auto evaluate = [&](std::size_t cell) {
        const double v = config.grid[cell / nq];
        const Quantity q = config.quantities[cell % nq];
        try {
            cells[cell] = compute(config, v, q);
        } catch (const SweepError&) {
            throw;
        } catch (const std::exception& e) {
            throw SweepError(q, v, e.what());
        }
    };
    detail::for_each_index(closed.size(), true, [&](std::size_t k) { evaluate(closed[k]); });
    for (std::size_t cell : mc) evaluate(cell);

    SweepResult out;
    out.rows = std::move(cells);
    out.notes = config.notes;
    if (auto note = linear_posterior_note(config)) out.notes.push_back(*note);
    return out;
}

void write_csv(std::ostream& out, const RunConfig&, const SweepResult& result) {
    out << "sweep_var,value,quantity,valid,std_error\n";
    for (const SweepRow& r : result.rows) {
        out << format_number(r.sweep_value) << ',' << format_number(r.value) << ',' << to_string(r.quantity) << ','
            << (r.valid ? "true" : "false") << ',';
        if (r.std_error) out << format_number(*r.std_error);
        out << '\n';
    }
}

void write_json(std::ostream& out, const RunConfig& config, const SweepResult& result) {
    json rows = json::array();
    for (const SweepRow& r : result.rows) {
        json row{{"sweep_var", r.sweep_value},
                 {"value", r.value},
                 {"quantity", to_string(r.quantity)},
                 {"valid", r.valid},
                 {"std_error", nullptr}};
        if (r.std_error) row["std_error"] = *r.std_error;
        rows.push_back(std::move(row));
    }
    json doc{{"model", to_string(config.model)},
             {"sweep_variable", to_string(config.variable)},
             {"rows", std::move(rows)},
             {"notes", result.notes}};
    if (config.mc) doc["mc"] = {{"n_samples", config.mc->n_samples}, {"seed", config.mc->seed}};
    out << doc.dump(2) << '\n';
}

void write_balls_csv(std::ostream& out, const std::string& generator, double cx, double cy, double radius,
                     int resolution) {
    const Generator gen = Generator::by_name(generator, 2);
    if (gen.dimension() != 2) throw DomainError("balls need a two-dimensional generator");
    Point c(2);
    c << cx, cy;
    struct Curve {
        const char* name;
        Generator gen;
        BallOrientation orientation;
    };
    const Curve curves[] = {
        {"bregman", gen, BallOrientation::first_argument},
        {"bregman-reversed", gen, BallOrientation::second_argument},
        {"euclidean", Generator::squared(2), BallOrientation::first_argument},
    };
    out << "curve,angle,x1,x2\n";
    for (const Curve& cv : curves) {
        for (const BoundaryPoint& bp : ball_boundary(cv.gen, {radius, c, cv.orientation}, resolution))
            out << cv.name << ',' << format_number(bp.angle) << ',' << format_number(bp.point[0]) << ','
                << format_number(bp.point[1]) << '\n';
    }
}

}  // namespace bregcr
