"""
CKNKit subcommands
Copyright (c) 2025 Arjun-M/CKNKit
"""

import logging

import numpy as np

from ..exceptions import ConvergenceError, DomainError, NoSerrinExponentError, ValidationError
from ..exceptions.handlers import EXIT_NUMERICAL
from ..exponents import critical_exponents, exponent_data, hardy_reduction
from ..liouville import liouville_verdict, replay_certificate, witness_trace
from ..operator import apply_radial, compact_bump, fundamental_profiles, gaussian, log_cutoff_power, rational
from ..poisson import (
    SourceTerm,
    green_solve,
    hardy_round_trip,
    power_source_solution,
    solution_coefficient,
    solution_summary,
    solution_table,
    verify_solution,
)
from ..quadrature import TEST_FUNCTIONS, ckn_battery, ckn_inequality_check, identity_residual, near_extremal_ratio
from ..quadrature.ckn import RATIO_TOLERANCE, near_extremal_exponent
from ..sweep import SWEEP_COLUMNS, build_cells, run_sweep
from .app import CKNKitApp

logger = logging.getLogger(__name__)

app = CKNKitApp()

IDENTITY_TOLERANCE = 1e-6
FUNDAMENTAL_POINTS = 61
NEAR_EXTREMAL_WIDTHS = (4.0, 8.0, 16.0)


@app.command("exponents", help="characteristic exponents, regime, critical exponents and Hardy reduction")
async def cmd_exponents(ctx):
    params = ctx.params
    data = exponent_data(params)
    results = ctx.report.results
    results['params'] = params.to_dict()
    results['regime'] = params.regime.value
    results['exponents'] = {**data.to_dict(), 'wronskian': data.wronskian}

    reduction = hardy_reduction(params)
    reduced = exponent_data(reduction.reduced)
    results['hardy_reduction'] = {
        'mu_tilde': reduction.mu_tilde,
        'exponent_shift': reduction.exponent_shift,
        'tau_minus': reduced.tau_minus,
        'tau_plus': reduced.tau_plus,
    }

    try:
        results['critical_exponents'] = critical_exponents(params, ctx.config.theta)._asdict()
    except (NoSerrinExponentError, DomainError) as e:
        results['critical_exponents'] = None
        results['critical_exponents_unavailable'] = e.message


@app.command("fundamental", help="Phi, Gamma and their residuals on a radial grid")
async def cmd_fundamental(ctx):
    params = ctx.params
    data = exponent_data(params)
    R = ctx.config.domain_radius
    radii = np.geomspace(R * 1e-3, R, FUNDAMENTAL_POINTS)
    phi, gamma = fundamental_profiles(params)

    phi_values, gamma_values = np.asarray(phi.eval(radii)), np.asarray(gamma.eval(radii))
    phi_residual = np.asarray(apply_radial(params, phi, radii))
    gamma_residual = np.asarray(apply_radial(params, gamma, radii))

    ctx.report.results.update({
        'regime': params.regime.value,
        'exponents': data.to_dict(),
        'points': int(radii.size),
        'max_residual_phi': float(np.max(np.abs(phi_residual))),
        'max_residual_gamma': float(np.max(np.abs(gamma_residual))),
    })
    rows = [
        {'r': r, 'phi': a, 'gamma': b, 'residual_phi': ra, 'residual_gamma': rb}
        for r, a, b, ra, rb in zip(radii.tolist(), phi_values.tolist(), gamma_values.tolist(),
                                   phi_residual.tolist(), gamma_residual.tolist())
    ]
    ctx.table(('r', 'phi', 'gamma', 'residual_phi', 'residual_gamma'), rows)


@app.command("verify-identity", help="quadrature check of L Phi = c delta against a test function")
async def cmd_verify_identity(ctx):
    name = ctx.config.test_function or 'bump'
    if name not in TEST_FUNCTIONS:
        raise ValidationError(f"unknown test function {name!r}; expected one of {sorted(TEST_FUNCTIONS)}",
                              context={'test_function': name})
    xi = TEST_FUNCTIONS[name](ctx.config.domain_radius)
    result = identity_residual(ctx.params, xi, ctx.spec)
    if not result.converged:
        raise ConvergenceError("identity quadrature did not converge", context=result.to_dict())

    ctx.report.results.update({
        'test_function': xi.name,
        'identity': result.to_dict(),
        'tolerance': IDENTITY_TOLERANCE,
    })
    if result.relative_residual > IDENTITY_TOLERANCE:
        ctx.fail(EXIT_NUMERICAL, f"relative residual {result.relative_residual:.3g} above {IDENTITY_TOLERANCE:g}")


def _ckn_function(name: str, N: float, a: float, radius: float):
    beta = near_extremal_exponent(N, a)
    named = {
        'gaussian': lambda: gaussian(1.0),
        'rational': lambda: rational(1.0),
        'bump': lambda: compact_bump(radius),
        'near-extremal': lambda: log_cutoff_power(beta, 8.0),
    }
    if name not in named:
        raise ValidationError(f"unknown CKN test function {name!r}; expected one of {sorted(named)}",
                              context={'test_function': name})
    return named[name]()


@app.command("ckn-check", help="weighted Hardy (CKN) inequality ratios on radial functions")
async def cmd_ckn_check(ctx):
    config = ctx.config
    N, a = config.N, config.a
    if config.test_function:
        profiles = [_ckn_function(config.test_function, N, a, config.domain_radius)]
    else:
        profiles = ckn_battery(N, a)

    checks = [ckn_inequality_check(N, a, u, ctx.spec) for u in profiles]
    holds = all(check.ratio >= 1.0 - RATIO_TOLERANCE for check in checks)
    ctx.report.results.update({
        'checks': [check.to_dict() for check in checks],
        'min_ratio': min(check.ratio for check in checks),
        'holds': holds,
        'near_extremal': [
            {'width': width, 'ratio': near_extremal_ratio(N, a, width)} for width in NEAR_EXTREMAL_WIDTHS
        ],
    })
    ctx.table(('name', 'lhs', 'rhs', 'ratio', 'converged', 'diagnosis'), [check.to_dict() for check in checks])
    if not holds:
        ctx.fail(EXIT_NUMERICAL, "CKN ratio below one beyond tolerance")


@app.command("poisson", help="Green-function solve of L u = r^theta with singular coefficient k")
async def cmd_poisson(ctx):
    params, config = ctx.params, ctx.config
    R, k = config.domain_radius, config.k
    source = SourceTerm.power(config.theta)

    solution = green_solve(params, source, R, k, ctx.spec)
    results = ctx.report.results
    results['solution'] = solution_summary(solution)
    results['max_residual'] = verify_solution(params, solution, source, R / 100.0, R / 2.0)

    if k == 0.0 and solution.resonance is None:
        radii = np.geomspace(R / 100.0, R / 2.0, 25)
        exact = power_source_solution(params, config.theta, R)(radii)
        error = np.abs(np.asarray(solution(radii)) - exact) / np.maximum(np.abs(exact), 1e-300)
        results['closed_form_max_relative_error'] = float(np.max(error))

    if solution.asymptotics_hypothesis:
        estimate = solution_coefficient(solution)
        results['k_round_trip'] = {
            'k': k,
            'k_estimate': estimate.k,
            'error': abs(estimate.k - k),
            'order': estimate.order,
            'error_estimate': estimate.error_estimate,
        }
    else:
        results['k_round_trip'] = None
        results['asymptotics'] = "not asserted: theta + 2 - tau_minus <= 0"

    results['hardy_round_trip'] = hardy_round_trip(params, source, R, k, ctx.spec)
    ctx.table(('r', 'u', 'residual'), solution_table(solution))


@app.command("liouville", help="nonexistence certificate for L u >= |x|^theta u^p")
async def cmd_liouville(ctx):
    config = ctx.config
    result = liouville_verdict(ctx.params, config.theta, config.scalar_p(), config.q0)
    replay = replay_certificate(result.certificate)
    results = ctx.report.results
    results['verdict'] = result.verdict
    results['certificate'] = result.certificate
    results['replay'] = replay._asdict()

    if config.witness and result.trace.tau_sequence:
        witnesses = witness_trace(result.trace, spec=ctx.spec)
        results['witness'] = [w.to_dict() for w in witnesses]
        if not all(w.dominated or w.contradiction for w in witnesses):
            ctx.fail(EXIT_NUMERICAL, "numeric solution does not dominate the lower bound at every step")

    trace = result.trace.shifted or result.trace
    ctx.table(('j', 'tau', 'd'), [
        {'j': j, 'tau': tau, 'd': d} for j, (tau, d) in enumerate(zip(trace.tau_sequence, trace.d_sequence))
    ])
    if not replay.valid:
        ctx.fail(EXIT_NUMERICAL, "certificate replay failed: " + "; ".join(replay.failures))


@app.command("sweep", help="Liouville phase map over (mu1, mu2, p) grids")
async def cmd_sweep(ctx):
    config = ctx.config
    mu1_grid, mu2_grid, p_grid = config.sweep_grids()
    cells = build_cells(mu1_grid, mu2_grid, p_grid, config.theta)
    result = await run_sweep(config.N, cells, config.q0, config.workers)

    rows = result.rows
    decided = [row for row in rows if row['verdict'] != 'Error']
    agreement = sum(
        (row['verdict'] == 'Nonexistent') == (row['p'] >= row['p_sharp'] * (1.0 - 1e-12)) for row in decided
    )
    ctx.report.results.update({
        'cells': len(rows),
        'failed': result.failed,
        'nonexistent': sum(row['verdict'] == 'Nonexistent' for row in rows),
        'inconclusive': sum(row['verdict'] == 'Inconclusive' for row in rows),
        'p_sharp_agreement': agreement / len(decided) if decided else None,
    })
    ctx.table(SWEEP_COLUMNS, rows)
