#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rkhs/bigfloat.hpp"
#include "rkhs/functions.hpp"
#include "rkhs/kernels.hpp"
#include "rkhs/sequences.hpp"

namespace rkhs {

inline constexpr const char* kWitnessSchema = "rkhs-cert/witness/v1";

/// Witness sizes up to this many points are evaluated on the full deflated Gram matrix.
inline constexpr std::int64_t kDenseLimit = 512;
/// Per-row number of off-diagonal terms summed explicitly in banded evaluation.
inline constexpr std::int64_t kDefaultBandLimit = 64;

enum class AlphaProvenance { Declared, Empirical };

enum class FormEvaluation {
    Dense,   // every term of the double sum
    Banded,  // near-diagonal terms summed, the rest bounded through profile monotonicity
};

/// A negative quadratic form of R = K - c^2 f f^T on x_{ell+1}, ..., x_{ell+N},
/// which refutes positive semidefiniteness of R for this c.
struct WitnessCertificate {
    std::string kernel_id;
    std::string function_id;
    std::string sequence_id;
    double c = 0.0;
    double alpha = 0.0;
    AlphaProvenance alpha_provenance = AlphaProvenance::Empirical;
    double C_K = 0.0;
    std::int64_t N = 0;
    std::int64_t ell = 0;
    std::int64_t doublings = 0;
    std::vector<double> coefficients;
    std::vector<double> points;
    BigFloat r_value;
    /// Upper bound on the terms left out of r_value; zero for dense evaluation.
    BigFloat truncation_bound;
    FormEvaluation evaluation = FormEvaluation::Dense;
    std::int64_t band_limit = kDefaultBandLimit;
    unsigned precision_bits = kDefaultPrecisionBits;
};

struct WitnessOptions {
    unsigned precision_bits = kDefaultPrecisionBits;
    int max_doublings = 6;
    /// Check sign * f(x) >= alpha on the witness points when alpha is not declared.
    bool enforce_tail_hypothesis = true;
    std::int64_t band_limit = kDefaultBandLimit;
};

/// Least integer strictly above 2 C_K / (c^2 alpha^2).
std::int64_t n_threshold(double C_K, double c, double alpha);

/// Smallest ell >= ell_min in {0, 1, 2, 4, ..., ell_max} with
/// max_{n != m <= N} |K(x_{ell+n}, x_{ell+m})| <= bound. Throws `DecayNotMet`.
std::int64_t find_ell(const Kernel& k, const SequenceSpec& seq, std::int64_t N, const BigFloat& bound,
                      std::int64_t ell_max, std::int64_t ell_min = 0,
                      unsigned precision_bits = kDefaultPrecisionBits);

struct AlphaChoice {
    double alpha = 0.0;
    int sign = 1;
    AlphaProvenance provenance = AlphaProvenance::Empirical;
    /// Smallest ell for which x_{ell+1} lies in the declared tail.
    std::int64_t ell_min = 0;
};

/// Declared bounds first (integer-point bound on integer-valued sequences,
/// then the tail in the sequence's direction), else `tail_lower_bound` on the
/// first 64 terms. Throws `PreconditionError` when neither exists.
AlphaChoice resolve_alpha(const CandidateFunction& f, const SequenceSpec& seq);

/// Classifies a caller-supplied alpha against the declarations of f.
AlphaChoice classify_alpha(const CandidateFunction& f, const SequenceSpec& seq, double alpha);

struct FormEstimate {
    BigFloat value;          // computed part of sum_{n,m} a_n a_m R(x_n, x_m)
    BigFloat omitted_bound;  // bound on the terms not summed
    BigFloat magnitude;      // sum of term magnitudes, for the rounding margin
    FormEvaluation evaluation = FormEvaluation::Dense;
};

/// r with a = (1, ..., 1), dense up to `kDenseLimit` points and banded beyond.
FormEstimate deflated_form_ones(const Kernel& k, const CandidateFunction& f, double c, std::span<const double> points,
                                unsigned precision_bits, std::int64_t band_limit = kDefaultBandLimit);

/// Starts at N = n_threshold, picks ell by `find_ell` with bound c^2 alpha^2 / 2,
/// and doubles N until r(N, ell) is provably negative or the cap is hit.
WitnessCertificate build_witness(const Kernel& k, const CandidateFunction& f, const SequenceSpec& seq, double c,
                                 double alpha, std::int64_t ell_max, const WitnessOptions& options = {});

struct SweepFailure {
    double c = 0.0;
    std::string reason;
};

struct SweepResult {
    std::vector<double> c_values;
    std::vector<WitnessCertificate> certificates;
    std::vector<SweepFailure> failures;
    std::vector<std::int64_t> n_star;       // per c, in grid order
    std::vector<double> scaled_threshold;   // N*(c) c^2 alpha^2 / (2 C_K), near 1
    AlphaChoice alpha;
};

/// {2^0, 2^-1, ..., 2^-8}.
std::vector<double> default_c_grid();

/// Runs `build_witness` for each c; results merge in grid order whatever `jobs` is.
SweepResult sweep_c(const Kernel& k, const CandidateFunction& f, const SequenceSpec& seq,
                    std::span<const double> c_grid, std::int64_t ell_max, const WitnessOptions& options = {},
                    std::optional<double> alpha = std::nullopt, unsigned jobs = 1);

/// Recomputes r from the stored points with fresh kernel and function
/// evaluations and re-checks the size threshold. Throws `PreconditionError` if
/// the certificate names a different kernel or function.
bool verify_certificate(const WitnessCertificate& cert, const Kernel& k, const CandidateFunction& f);

std::string to_string(AlphaProvenance provenance);
std::string to_string(FormEvaluation evaluation);

}  // namespace rkhs
