#pragma once

#include <stdexcept>
#include <string>

namespace hqc {

/// Base of every exception thrown by the library. The category drives the
/// CLI exit status.
class error : public std::runtime_error {
 public:
  enum class category { usage, layout, numerics, physics_guard, schema, integration };

  error(category c, const std::string& what) : std::runtime_error(what), category_(c) {}
  category kind() const noexcept { return category_; }

 private:
  category category_;
};

/// Violated argument precondition.
class usage_error : public error {
 public:
  explicit usage_error(const std::string& what) : error(category::usage, what) {}
};

class layout_error : public error {
 public:
  explicit layout_error(const std::string& what) : error(category::layout, what) {}
};

class not_hermitian_error : public error {
 public:
  explicit not_hermitian_error(const std::string& what) : error(category::numerics, what) {}
};

/// Eigenvalue groups changed across a finite-difference stencil.
class level_crossing_error : public error {
 public:
  explicit level_crossing_error(const std::string& what) : error(category::numerics, what) {}
};

/// Dark frame at the end of a schedule differs from the frame at the start.
class loop_closure_error : public error {
 public:
  explicit loop_closure_error(const std::string& what) : error(category::numerics, what) {}
};

class guard_violation : public error {
 public:
  guard_violation(std::string guard, const std::string& what)
      : error(category::physics_guard, what), guard_(std::move(guard)) {}
  const std::string& guard() const noexcept { return guard_; }

 private:
  std::string guard_;
};

class schema_error : public error {
 public:
  schema_error(std::string field, const std::string& what)
      : error(category::schema, field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class integration_error : public error {
 public:
  integration_error(double t, const std::string& what)
      : error(category::integration, what + " (t = " + std::to_string(t) + ")"), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class step_underflow_error : public integration_error {
 public:
  step_underflow_error(double t, double h)
      : integration_error(t, "step size underflow, h = " + std::to_string(h)) {}
};

}  // namespace hqc
