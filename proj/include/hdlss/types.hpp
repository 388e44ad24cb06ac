#pragma once

#include <stdexcept>
#include <string>

namespace hdlss {

// Error categories; the CLI maps these onto distinct exit codes.
enum class ErrorKind {
    Config,      // bad flags / malformed run configuration
    Data,        // malformed or inconsistent input data
    Dimension,   // size mismatch between objects that must agree
    Degenerate,  // mathematically undefined case (zero direction, coincident landmarks, ...)
    Solver,      // optimizer failed to reach its certified tolerances
    Io           // file format or filesystem failure
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

/// Thrown when an iterative solver hits its cap before reaching tolerance.
/// Carries the residuals actually achieved so callers can report them.
class SolverError : public Error {
  public:
    SolverError(const std::string& msg, double rel_gap, double primal_res, double dual_res,
                long iterations)
        : Error(ErrorKind::Solver, msg),
          rel_gap(rel_gap),
          primal_res(primal_res),
          dual_res(dual_res),
          iterations(iterations) {}

    double rel_gap;
    double primal_res;
    double dual_res;
    long iterations;
};

enum class Method { Dwd, Svm, Fld, Mdp, Pca, MeanDiff };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::Dwd: return "dwd";
        case Method::Svm: return "svm";
        case Method::Fld: return "fld";
        case Method::Mdp: return "mdp";
        case Method::Pca: return "pca";
        case Method::MeanDiff: return "mean-diff";
    }
    return "?";
}

inline Method method_from_name(const std::string& s) {
    if (s == "dwd") return Method::Dwd;
    if (s == "svm") return Method::Svm;
    if (s == "fld") return Method::Fld;
    if (s == "mdp") return Method::Mdp;
    if (s == "pca") return Method::Pca;
    if (s == "mean-diff") return Method::MeanDiff;
    throw Error(ErrorKind::Config, "unknown method '" + s + "'");
}

}  // namespace hdlss
