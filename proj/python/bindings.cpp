#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "relaynet/analytic.hpp"
#include "relaynet/geometry.hpp"
#include "relaynet/link_metrics.hpp"
#include "relaynet/markov.hpp"
#include "relaynet/simulator.hpp"
#include "relaynet/strategy.hpp"

namespace py = pybind11;
using namespace relaynet;

namespace {

std::vector<TierSpec> make_tiers(const std::vector<std::pair<double, int>>& height_count) {
    std::vector<TierSpec> tiers;
    for (const auto& [h, n] : height_count)
        tiers.push_back({kEarthRadiusKm + h, h, n});
    validate_tiers(tiers);
    return tiers;
}

ConstraintSet make_constraints(double theta_r, double theta_s, double d_th, double theta_m) {
    return {theta_r, theta_s, d_th, theta_m};
}

PriorityStrategy make_strategy(const std::vector<int>& ranks) {
    PriorityStrategy s{ranks};
    if (!s.valid()) throw std::invalid_argument("ranks must be a permutation of 1..K");
    return s;
}

}  // namespace

PYBIND11_MODULE(_relaynet, m) {
    m.doc() = "reliability analysis of multi-hop routing in layered relay networks";

    py::class_<TierSpec>(m, "TierSpec")
        .def(py::init([](double height_km, int count) {
                 return TierSpec{kEarthRadiusKm + height_km, height_km, count};
             }),
             py::arg("height_km"), py::arg("count"))
        .def_readonly("radius_km", &TierSpec::radius_km)
        .def_readonly("height_km", &TierSpec::height_km)
        .def_readonly("count", &TierSpec::count);

    py::class_<ConstraintSet>(m, "ConstraintSet")
        .def(py::init(&make_constraints), py::arg("theta_r") = kPi / 6.0,
             py::arg("theta_s") = kPi / 10.0, py::arg("d_th_km") = 4000.0,
             py::arg("theta_m") = kPi)
        .def_readwrite("theta_r", &ConstraintSet::theta_r)
        .def_readwrite("theta_s", &ConstraintSet::theta_s)
        .def_readwrite("d_th", &ConstraintSet::d_th)
        .def_readwrite("theta_m", &ConstraintSet::theta_m);

    m.def("max_dome_angle", &max_dome_angle, py::arg("i"), py::arg("j"), py::arg("tiers"),
          py::arg("constraints"), "maximum dome angle of a reachable link between two tiers");
    m.def("tier_interruption_matrix", &tier_interruption_matrix);
    m.def("selection_interruption_matrix", &selection_interruption_matrix);
    m.def("single_hop_vector", &single_hop_vector);

    m.def("build_t1",
          [](const std::vector<int>& ranks, const Matrix& p) {
              return build_t1(make_strategy(ranks), p);
          });
    m.def("build_t2",
          [](const std::vector<int>& ranks, const Matrix& p) {
              return build_t2(make_strategy(ranks), p);
          });
    m.def("build_t3",
          [](const std::vector<int>& ranks, const Matrix& p) {
              return build_t3(make_strategy(ranks), p);
          });
    m.def("stationary_distribution", [](const Matrix& t1, const Matrix& p) {
        return stationary_distribution(t1, reachable_tiers(p));
    });
    m.def("multihop_interruption", &multihop_interruption, py::arg("t2"), py::arg("t3"),
          py::arg("n_h"));
    m.def("cumulative_interruption", &cumulative_interruption);

    m.def("hop_statistics",
          [](const std::vector<int>& ranks, const std::vector<TierSpec>& tiers,
             const ConstraintSet& c) {
              Matrix p = selection_interruption_matrix(tiers, c);
              HopStatistics h = hop_statistics(make_strategy(ranks), p, tiers, c);
              return py::dict(py::arg("mu") = h.mu, py::arg("n_h") = h.n_h,
                              py::arg("theta_bar") = h.theta_bar);
          });

    m.def("stationary_optimal", [](const std::vector<TierSpec>& tiers, const ConstraintSet& c) {
        return stationary_optimal(selection_interruption_matrix(tiers, c)).ranks;
    });
    m.def("single_hop_inspired",
          [](const std::vector<TierSpec>& tiers, const ConstraintSet& c) {
              return single_hop_inspired(single_hop_vector(tiers, c)).ranks;
          });
    m.def("density_inspired", [](const std::vector<TierSpec>& tiers, const ConstraintSet& c) {
        Matrix p = selection_interruption_matrix(tiers, c);
        return density_inspired(tiers, reachable_tiers(p)).ranks;
    });

    m.def(
        "simulate",
        [](const std::vector<TierSpec>& tiers, const ConstraintSet& c,
           const std::vector<int>& ranks, std::int64_t iterations, std::uint64_t seed,
           int threads) {
            SimContext ctx(tiers, c, make_strategy(ranks));
            SimulationEstimate e;
            {
                py::gil_scoped_release release;
                e = estimate(ctx, iterations, seed, threads);
            }
            return py::dict(py::arg("interruption_probability") = e.interruption_probability,
                            py::arg("standard_error") = e.standard_error,
                            py::arg("mean_hops_success") = e.mean_hops_success,
                            py::arg("hop_histogram") = e.hop_histogram,
                            py::arg("per_hop_interruptions") = e.per_hop_interruptions,
                            py::arg("iterations") = e.iterations,
                            py::arg("interrupted") = e.interrupted);
        },
        py::arg("tiers"), py::arg("constraints"), py::arg("ranks"),
        py::arg("iterations") = 10000, py::arg("seed") = 1, py::arg("threads") = 0);

    m.def("availability", [](const std::vector<TierSpec>& tiers, const ConstraintSet& c,
                             const std::vector<int>& ranks) {
        return availability(tiers, c, make_strategy(ranks));
    });
    m.def(
        "coverage_probability",
        [](double gamma, const std::vector<TierSpec>& tiers, const ConstraintSet& c,
           const std::vector<int>& ranks) {
            return coverage_probability(gamma, tiers, c, make_strategy(ranks), LinkBudget{});
        },
        py::arg("gamma"), py::arg("tiers"), py::arg("constraints"), py::arg("ranks"));
    m.def(
        "urllc_rate",
        [](double gamma, double tau_s, const std::vector<TierSpec>& tiers,
           const ConstraintSet& c, const std::vector<int>& ranks) {
            return urllc_rate(gamma, tau_s, tiers, c, make_strategy(ranks), LinkBudget{});
        },
        py::arg("gamma"), py::arg("tau_s"), py::arg("tiers"), py::arg("constraints"),
        py::arg("ranks"));
    m.def(
        "multiflow_total",
        [](const std::vector<double>& dihedral_angles, const std::vector<TierSpec>& tiers,
           const ConstraintSet& c, const std::vector<int>& ranks) {
            return multiflow_total(FlowSpec{dihedral_angles}, tiers, c, make_strategy(ranks));
        },
        py::arg("dihedral_angles"), py::arg("tiers"), py::arg("constraints"), py::arg("ranks"));

    m.def("make_tiers", &make_tiers, py::arg("height_count"),
          "build a tier list from (height_km, count) pairs");
}
