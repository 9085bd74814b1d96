from __future__ import annotations

import uqflow


def test_all_names_resolve():
    for name in uqflow.__all__:
        assert getattr(uqflow, name, None) is not None, name


def test_quickstart_names_are_exported():
    # the names the README example composes end to end
    for name in (
        "GridRule",
        "build_plan",
        "build_surrogate",
        "evaluate_surrogate",
        "uniform_model",
        "quadrature_plan",
        "moment_estimates",
        "default_orders",
        "load_case",
        "to_network",
        "solve_power_flow",
        "StochasticPerturbation",
        "LoadTerm",
        "QuantityOfInterest",
        "qoi_sampler",
    ):
        assert name in uqflow.__all__


def test_errors_are_one_family():
    assert issubclass(uqflow.NonconvergenceError, uqflow.UqflowError)
    assert issubclass(uqflow.CaseFormatError, uqflow.UqflowError)
    assert issubclass(uqflow.BoundUnavailableError, uqflow.UqflowError)
