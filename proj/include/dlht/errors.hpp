#pragma once
#include <cstddef>
#include <stdexcept>
#include <string>

namespace dlht {

// Dimension or shape disagreement between a network, a dataset, or a document.
class ShapeError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

// Statistic that cannot be computed from the data supplied (too few points,
// zero variance).
class InsufficientData : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

class InfeasibleError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

class TrainingDiverged : public std::runtime_error {
   public:
    TrainingDiverged(std::size_t epoch, const std::string& what)
        : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"),
          epoch_(epoch) {}
    std::size_t epoch() const { return epoch_; }

   private:
    std::size_t epoch_;
};

class LoadError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class UsageError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

// Every candidate structure failed to train.
class SelectionError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class CalibrationError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Wraps an error raised inside one stage of an experiment run.
class StageError : public std::runtime_error {
   public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error("[" + stage + "] " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

   private:
    std::string stage_;
};

}  // namespace dlht
