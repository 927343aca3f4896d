#pragma once

#include "bregcr/bounds.hpp"
#include "bregcr/errors.hpp"
#include "bregcr/priors.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bregcr {

enum class Model { gamma_poisson, beta_binomial };
enum class SweepVariable { a, n };
enum class Quantity { mmse_exact, lmmse, cr_mmse, bregman_exact, cr_linear, cr_universal, mc_risk };
enum class OutputFormat { csv, json };

std::string to_string(Model m);
std::string to_string(SweepVariable v);
std::string to_string(Quantity q);

struct MonteCarloSettings {
    std::size_t n_samples = 100000;
    std::uint64_t seed = 0;
};

struct RunConfig {
    Model model = Model::gamma_poisson;
    // (alpha, theta) for gamma, (alpha, beta) for beta.
    double prior_p1 = 1.0;
    double prior_p2 = 1.0;
    // Channel parameters held fixed while the other one is swept.
    double a = 1.0;
    int n = 1;
    SweepVariable variable = SweepVariable::a;
    std::vector<double> grid;
    std::vector<Quantity> quantities;
    std::optional<MonteCarloSettings> mc;
    MomentMode moment_mode = MomentMode::corrected;
    ScoreMode score_mode = ScoreMode::corrected;
    DeltaArgumentOrder delta_order = DeltaArgumentOrder::printed;
    // Generator for mc-risk; empty selects neg-entropy (Poisson) or binary-logit (binomial).
    std::string generator;
    std::string output_path = "-";
    OutputFormat format = OutputFormat::csv;
    // Printed on standard error when the sweep runs.
    std::vector<std::string> notes;

    Prior prior() const;
    Channel channel_at(double grid_value) const;
};

// Parses and validates a JSON config.  Errors are ConfigError with a JSON path,
// e.g. "$.sweep.grid[3]: grid must be sorted".  default_seed fills mc.seed
// when the config omits it.
RunConfig parse_config(const nlohmann::json& j, std::optional<std::uint64_t> default_seed = std::nullopt);
RunConfig load_config(const std::string& path, std::optional<std::uint64_t> default_seed = std::nullopt);
void validate(const RunConfig& c);

// fig4, fig6, fig7, fig8.  fig2 is a ball export, see write_balls_csv.
RunConfig preset_config(const std::string& name, std::optional<std::uint64_t> default_seed = std::nullopt);
bool is_sweep_preset(const std::string& name);

struct SweepRow {
    double sweep_value = 0.0;
    Quantity quantity = Quantity::mmse_exact;
    double value = 0.0;
    bool valid = true;
    std::optional<double> std_error;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // grid order, then quantity order
    std::vector<std::string> notes;
};

// A quantity failed numerically at one grid point.
class SweepError : public Error {
public:
    SweepError(Quantity q, double at, const std::string& what);
    Quantity quantity() const { return quantity_; }

private:
    Quantity quantity_;
};

// Closed-form cells run in parallel across the grid; Monte-Carlo cells run one
// at a time with a parallel inner loop.  Output is independent of thread count.
SweepResult run_sweep(const RunConfig& config);

// sweep_var,value,quantity,valid,std_error
void write_csv(std::ostream& out, const RunConfig& config, const SweepResult& result);
void write_json(std::ostream& out, const RunConfig& config, const SweepResult& result);

// curve,angle,x1,x2 for the Bregman ball in both orientations and the
// Euclidean ball sqrt(r) around the same center.  Throws DomainError unless
// the generator is two-dimensional.
void write_balls_csv(std::ostream& out, const std::string& generator, double cx, double cy, double radius,
                     int resolution);

}  // namespace bregcr
