#include "blrs/commands.hpp"

#include <cstdio>
#include <fstream>

#include "blrs/benchmark.hpp"
#include "blrs/core.hpp"
#include "blrs/errors.hpp"
#include "blrs/model_io.hpp"
#include "blrs/oracle.hpp"
#include "blrs/synthetic.hpp"

namespace blrs::cli {

namespace {

// Runs body, mapping library exceptions to exit code 1.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitDataError;
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

int run_fit(const FitOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.solver != "qem" && options.solver != "oracle") {
      throw DomainError("unknown solver '" + options.solver + "' (qem|oracle)");
    }
    const DegreesOfFreedom nu = DegreesOfFreedom::parse(options.nu);
    FitConfig config;
    config.rel_tol = options.rel_tol;
    config.max_iter = options.max_iter;
    config.validate();

    const Dataset data = load_csv(options.input, options.target, true, options.drop);
    const auto [phi, report] = normalize_columns(data);
    const Precompute pre = precompute(phi, data.targets);
    if (phi.underdetermined()) {
      err << "warning: " << phi.cols() << " features exceed " << phi.rows()
          << " rows\n";
    }

    FittedModel model;
    model.nu = nu;
    model.normalization = report;
    if (options.solver == "qem") {
      const FitResult fit = fit_qem(pre, phi, nu, config);
      model.alpha = fit.hyperparams.alpha;
      model.beta = fit.hyperparams.beta;
      model.mu = fit.mu;
      model.iterations = fit.iterations;
      model.converged = fit.converged;
    } else {
      const oracle::GammaSolution sol =
          oracle::ml_solve(oracle::project_spectrum(pre), pre.m);
      if (sol.boundary == oracle::Boundary::lower) {
        throw NumericalError("maximum likelihood at gamma = 0: alpha is unbounded "
                             "(targets orthogonal to the features)");
      }
      if (sol.boundary == oracle::Boundary::upper) {
        err << "warning: maximum likelihood reached the gamma upper bound\n";
      }
      model.alpha = sol.alpha;
      model.beta = sol.beta;
      model.mu = posterior_mean(pre, sol.alpha, sol.beta);
      model.converged = true;
    }

    save_model(model, options.out);
    out << "alpha=" << number(model.alpha) << " beta=" << number(model.beta)
        << " cnt=" << model.iterations << " log_evidence="
        << number(log_evidence(pre, nu, model.alpha, model.beta))
        << " converged=" << (model.converged ? "true" : "false") << '\n';
    if (!model.converged) {
      err << "error: not converged within max_iter=" << options.max_iter
          << " iterations\n";
      return kExitNotConverged;
    }
    return kExitOk;
  });
}

int run_predict(const PredictOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const FittedModel model = load_model(options.model);
    CsvOptions csv;
    csv.ignore_columns = options.drop;
    if (!options.target.empty()) csv.ignore_columns.push_back(options.target);
    const CsvTable table = read_csv(options.input, csv);
    if (table.values.cols() != model.normalization.input_columns()) {
      throw DataError("schema mismatch: model expects " +
                      std::to_string(model.normalization.input_columns()) +
                      " feature columns, input has " +
                      std::to_string(table.values.cols()));
    }
    const VectorXd predictions = model.predict_raw(table.values);

    std::ofstream file(options.out, std::ios::binary);
    if (!file) throw DataError("cannot write " + options.out.string());
    file << "prediction\n";
    char buf[32];
    for (Index i = 0; i < predictions.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", predictions(i));
      file << buf;
    }
    file.flush();
    if (!file) throw DataError("failed writing " + options.out.string());
    out << "wrote " << predictions.size() << " predictions to "
        << options.out.string() << '\n';
    return kExitOk;
  });
}

int run_benchmark(const BenchmarkOptions& options, std::ostream& out,
                  std::ostream& err) {
  return guarded(err, [&] {
    std::vector<DegreesOfFreedom> nus;
    for (const auto& text : options.nus) nus.push_back(DegreesOfFreedom::parse(text));
    if (nus.empty()) throw DomainError("no degrees of freedom to sweep");
    FitConfig config;
    config.rel_tol = options.rel_tol;
    config.max_iter = options.max_iter;
    config.validate();

    const Dataset data = load_csv(options.input, options.target, true, options.drop);
    bench::SplitSpec split;
    split.folds = options.folds;
    split.seed = options.seed;

    std::vector<std::size_t> trials;
    if (options.trial == 0) {
      for (std::size_t t = 1; t <= options.folds; ++t) trials.push_back(t);
    } else {
      trials.push_back(options.trial);
    }

    out << "# folds=" << options.folds << " seed=" << options.seed
        << " rel_tol=" << number(options.rel_tol) << " rows=" << data.rows() << '\n';
    for (std::size_t t : trials) {
      split.trial = t;
      const bench::TrialResult result = bench::run_trial(data, nus, split, config);
      out << bench::format_trial(result);
      for (const auto& row : result.rows) {
        err << "trial " << t << " nu=" << bench::format_nu(row.nu) << " "
            << number(row.wall_time_ms) << " ms\n";
      }
    }
    return kExitOk;
  });
}

int run_gen_synthetic(const SyntheticOptions& options, std::ostream& out,
                      std::ostream& err) {
  return guarded(err, [&] {
    const Dataset d = generate_synthetic(options.rows, options.features, options.alpha,
                                         options.beta, options.seed);
    write_csv(d, options.out);
    out << "wrote " << d.rows() << " rows to " << options.out.string() << '\n';
    return kExitOk;
  });
}

}  // namespace blrs::cli
