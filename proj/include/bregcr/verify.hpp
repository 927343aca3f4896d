#pragma once

// Cross-checks of the library against the independent oracles, grouped by
// module.  `bregcr verify` prints them; the acceptance suite reuses them.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace bregcr {

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = false;
    // Observed worst error (or margin) and the tolerance it was held to.
    double observed = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

// l2 form vs bregman on `pairs` random interior pairs per generator, law of
// cosines, inverse-weight polynomial chains, and the Pythagorean split of the
// risk around the posterior mean.
std::vector<CheckResult> verify_divergence(int pairs = 1000);
// Moments, score-weighted and hypergeometric moments against quadrature,
// scores against finite differences, and the 2F1 series against Euler's integral.
std::vector<CheckResult> verify_priors();
// Marginal pmfs and posterior means against quadrature, and the tower property.
std::vector<CheckResult> verify_channels();
// Every valid bound below the matching Monte-Carlo risk + 3 SE over
// 2 channels x 3 priors x grid_points, plus the variational evaluator at the
// optimal psi.
std::vector<CheckResult> verify_bounds(std::size_t samples = 100000, int grid_points = 5);

enum class VerifySuite { divergence, priors, channels, bounds, all };

VerifySuite parse_verify_suite(const std::string& name);

// Prints one line per check and a summary; returns true when every check passed.
bool run_verify(VerifySuite suite, std::ostream& out);

}  // namespace bregcr
