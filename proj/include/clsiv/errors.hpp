#pragma once

#include <stdexcept>
#include <string>

namespace clsiv {

/// Bad inputs: violated preconditions, out-of-range parameters, malformed specs.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// CSV ingestion failures (missing columns, unparseable cells, short files).
class csv_error : public validation_error {
public:
    using validation_error::validation_error;
};

/// Numerical failures during estimation (degenerate designs, leverage-1 rows).
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rank-deficient matrix where full rank was required. Carries the estimated
/// rank and a condition-number estimate so weak-instrument failures are legible.
class singular_error : public numeric_error {
public:
    singular_error(const std::string& what, long estimated_rank, long required_rank,
                   double condition_estimate)
        : numeric_error(what),
          estimated_rank(estimated_rank),
          required_rank(required_rank),
          condition_estimate(condition_estimate) {}

    long estimated_rank;
    long required_rank;
    double condition_estimate;
};

/// Bootstrap aborted because too many replicates failed.
class bootstrap_error : public numeric_error {
public:
    bootstrap_error(const std::string& what, int failures, int replicates)
        : numeric_error(what), failures(failures), replicates(replicates) {}

    int failures;
    int replicates;
};

}  // namespace clsiv
