#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "relay_aser/channel.hpp"
#include "relay_aser/config.hpp"
#include "relay_aser/errors.hpp"
#include "relay_aser/mcsim.hpp"
#include "relay_aser/modulation.hpp"
#include "relay_aser/poweralloc.hpp"
#include "relay_aser/specfun.hpp"

namespace py = pybind11;
using namespace relay_aser;

namespace {

specfun::Evaluation method(const std::string& m) {
  if (m == "integral") return specfun::Evaluation::Integral;
  if (m == "series") return specfun::Evaluation::Series;
  throw DomainError("method must be 'integral' or 'series'");
}

channel::FadingParams fading(const std::string& text) { return channel::fading_from_json(config::parse_text(text)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ASER of dual-hop DF relaying over mixed eta-mu / kappa-mu fading";

  static py::exception<ConvergenceError> conv(m, "ConvergenceError", PyExc_RuntimeError);
  static py::exception<config::ConfigError> cfg(m, "ConfigError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConvergenceError& e) {
      PyErr_SetString(conv.ptr(), e.what());
    } catch (const config::ConfigError& e) {
      PyErr_SetString(cfg.ptr(), e.what());
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const UnsupportedParameterError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  auto sf = m.def_submodule("specfun");
  sf.def("gaussian_q", &specfun::gaussian_q, py::arg("x"));
  sf.def("bounded_q", &specfun::bounded_q, py::arg("x"), py::arg("phi"));
  sf.def(
      "lauricella_fd",
      [](double a, std::vector<double> b, double c, std::vector<double> x, const std::string& how) {
        return specfun::lauricella_fd(a, b, c, x, {}, method(how));
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("x"), py::arg("method") = "integral");
  sf.def(
      "lauricella_phi1",
      [](double a, std::vector<double> b, double c, std::vector<double> x, double xn, const std::string& how) {
        return specfun::lauricella_phi1(a, b, c, x, xn, {}, method(how));
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("x"), py::arg("xn"), py::arg("method") = "integral");
  sf.def(
      "lauricella_phi2",
      [](double b1, double b2, double c, double x1, double x2) { return specfun::lauricella_phi2(b1, b2, c, x1, x2); },
      py::arg("b1"), py::arg("b2"), py::arg("c"), py::arg("x1"), py::arg("x2"));
  sf.def(
      "yacoub_y", [](double nu, double a, double b) { return specfun::yacoub_y(nu, a, b); }, py::arg("nu"),
      py::arg("a"), py::arg("b"));
  sf.def("bessel_i_scaled", &specfun::bessel_i_scaled, py::arg("nu"), py::arg("z"));

  // fading models travel as JSON text, e.g. '{"type": "eta-mu", "eta": 1, "mu": 2}'
  m.def(
      "_pdf", [](const std::string& f, double g, double gbar) { return channel::pdf(fading(f), g, gbar); },
      py::arg("fading"), py::arg("gamma"), py::arg("gbar"));
  m.def(
      "_mgf", [](const std::string& f, double z, double gbar) { return channel::mgf(fading(f), z, gbar); },
      py::arg("fading"), py::arg("z"), py::arg("gbar"));
  m.def(
      "_cdf", [](const std::string& f, double t, double gbar) { return channel::fading_cdf(fading(f), t, gbar); },
      py::arg("fading"), py::arg("gamma_th"), py::arg("gbar"));

  py::class_<config::Scenario>(m, "_Scenario")
      .def_static(
          "from_json", [](const std::string& text) { return config::scenario_from_json(config::parse_text(text)); })
      .def("to_json", [](const config::Scenario& s) { return config::scenario_to_json(s).dump(); })
      .def_readonly("snr_db", &config::Scenario::snr_db)
      .def(
          "aser",
          [](const config::Scenario& s, double snr_db) {
            py::gil_scoped_release nogil;
            return modulation::aser(s.system_at(snr_db), s.constellation);
          },
          py::arg("snr_db"))
      .def(
          "aser_quadrature",
          [](const config::Scenario& s, double snr_db) {
            py::gil_scoped_release nogil;
            return modulation::aser_quadrature(s.system_at(snr_db), s.constellation);
          },
          py::arg("snr_db"))
      .def(
          "aser_asym",
          [](const config::Scenario& s, double snr_db) {
            py::gil_scoped_release nogil;
            return modulation::aser_asym(s.system_at(snr_db), s.constellation);
          },
          py::arg("snr_db"))
      .def(
          "outage_sr",
          [](const config::Scenario& s, double snr_db) { return relay::outage_prob_sr(s.system_at(snr_db)); },
          py::arg("snr_db"))
      .def(
          "diversity_order",
          [](const config::Scenario& s) { return modulation::diversity_order(s.system_at(s.snr_db.front())); })
      .def(
          "simulate",
          [](const config::Scenario& s, double snr_db, std::int64_t trials, std::uint64_t seed, const std::string& mode,
             int workers) {
            mcsim::SimConfig c = s.sim;
            c.n_trials = trials;
            c.master_seed = seed;
            c.mode = mcsim::mode_from_string(mode);
            c.workers = workers;
            mcsim::SimResult r;
            {
              py::gil_scoped_release nogil;
              r = mcsim::simulate(s.system_at(snr_db), s.constellation, c);
            }
            py::dict d;
            d["aser"] = r.aser_hat;
            d["stderr"] = r.std_error;
            d["trials"] = r.n_trials;
            d["outage"] = r.n_outage;
            d["seconds"] = r.elapsed;
            return d;
          },
          py::arg("snr_db"), py::arg("trials") = 100000, py::arg("seed") = 1, py::arg("mode") = "semi_analytic",
          py::arg("workers") = 1)
      .def(
          "optimize_xi",
          [](const config::Scenario& s, double snr_db, double tol) {
            const auto r = poweralloc::optimize_xi(s.system_at(snr_db), s.constellation, tol);
            py::dict d;
            d["xi_opt"] = r.xi_opt;
            d["aser_at_opt"] = r.aser_at_opt;
            d["residual"] = r.residual;
            d["iterations"] = r.iterations;
            return d;
          },
          py::arg("snr_db"), py::arg("tol") = 1e-6);

  m.def(
      "_power_batch",
      [](const std::string& text, int workers) {
        const auto batch = config::power_batch_from_json(config::parse_text(text));
        std::vector<config::PowerRow> rows;
        {
          py::gil_scoped_release nogil;
          rows = config::solve_power_batch(batch, workers);
        }
        return config::power_rows_to_json(rows).dump();
      },
      py::arg("config"), py::arg("workers") = 1);
}
