#!/usr/bin/python
"""
fockop command line: parse, classify, apply, norms, fit and verify. Reports go to stdout, logs to stderr.
Exit codes: 0 success, 2 input errors, 1 internal invariant violations.
"""
import argparse
import logging
import os
import shlex
import sys
import time
import typing
from dataclasses import replace

from fockop import __version__, config
from fockop.analysis import (
    Kind, RaySpec, classify, corroborate, expression_base, exponent_report, fit_exponent,
    norm_sweep, verdict_operator,
)
from fockop.fockop_exceptions import (
    DegenerateSampleError, DimensionMismatchError, InvariantViolation, PreconditionError, SymbolSyntaxError,
)
from fockop.operators import (
    BasisExpansion, SpaceParams, apply_operator, basis_vector, finite_section, projection_apply, squared_norm,
)
from fockop.opexpr import parse_operator
from fockop.report import RunReport, read_samples_csv
from fockop.symbols import holomorphic_split, is_constant, is_holomorphic, parse_symbol, pretty_print
from fockop.utils import (
    format_gaussian, format_multiindex, format_rational, parse_direction, parse_multiindex, parse_rational,
    parse_t_range, radical_to_dict,
)
from fockop.verify import SUITES, verify_hankel_closed_form, verify_oracle, verify_orthonormality

logger = logging.getLogger(__name__)

INPUT_ERRORS = (SymbolSyntaxError, DimensionMismatchError, PreconditionError, DegenerateSampleError)

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_INPUT = 2


def setup_logging(debug: bool = False) -> logging.Logger:
    logging.basicConfig()
    root = logging.getLogger()
    sthandler = logging.StreamHandler(sys.stderr)
    sthandler.setFormatter(logging.Formatter(config.LOG_FORMAT, config.LOG_DATE_FORMAT))
    root.handlers.clear()
    root.addHandler(sthandler)
    root.setLevel(logging.DEBUG if debug else logging.INFO)
    return root


# ----------------------------------------------------------------- argument parsing

def _common(parser: argparse.ArgumentParser, symbols: bool = True, op: bool = False):
    parser.add_argument('-n', type=int, default=1, help='Dimension of C^n')
    parser.add_argument('-m', type=int, default=0, help='Order of the Fock-Sobolev space')
    if symbols:
        parser.add_argument('-f', type=str, help='First polynomial symbol, e.g. "z+2*conj(z)"')
        parser.add_argument('-g', type=str, help='Second polynomial symbol')
    if op:
        parser.add_argument('--op', type=str, help='Operator expression, e.g. "T(z*conj(z)) * T(z*conj(z))"')
    parser.add_argument('--format', choices=config.OUT_FORMATS, default='json', help='Report format')
    parser.add_argument('--jobs', type=int, default=None, help='Worker processes for sweeps and sampling')
    parser.add_argument('--seed', type=int, default=None, help='Oracle seed; FOCKOP_SEED takes precedence')
    parser.add_argument('--samples', type=int, default=None, help='Monte Carlo sample count')
    parser.add_argument('--tol', type=float, default=None,
                        help='Fit tolerance (fit, classify) or quadrature tolerance (verify oracle)')
    parser.add_argument('--timing', action='store_true', default=False,
                        help='Add wall clock seconds to the report (makes it non-reproducible)')
    parser.add_argument('-d', '--debug', action='store_true', default=False, help='Set log level to debug')


def _ray_args(parser: argparse.ArgumentParser):
    parser.add_argument('--ray', type=str, nargs='+', default=['ones'], help='Ray direction: ones or custom "d1|d2|..."')
    parser.add_argument('--base', type=str, default=None,
                        help='Ray base "a1|a2|..."; defaults to the smallest admissible alpha')
    parser.add_argument('--t', dest='t_range', type=str, default=f'{config.T_LO}:{config.T_HI}:geometric',
                        help='t values lo:hi:geometric|linear[:step]')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='fockop',
                                     description='Exact Toeplitz and Hankel products on Fock-Sobolev spaces F^{2,m}(C^n).',
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('parse', help='Parse symbols or an operator expression into canonical form',
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _common(p, op=True)

    p = sub.add_parser('classify', help='Boundedness / compactness verdicts',
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument('kind', choices=[k.value for k in Kind])
    _common(p)
    _ray_args(p)
    p.add_argument('--corroborate', action='store_true', default=False,
                   help='Compare the verdict with exact norms along the ray')

    p = sub.add_parser('apply', help='Apply an operator expression to e_alpha exactly',
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _common(p, op=True)
    p.add_argument('--alpha', type=str, default=None, help='Basis index "a1|a2|..."')
    p.add_argument('--coeff', type=str, default='1', help='Rational multiple of e_alpha')
    p.add_argument('--matrix', type=int, default=None, metavar='ORDER',
                   help='Finite section: entries <op e_alpha, e_eta> with |alpha|, |eta| <= ORDER')
    p.add_argument('--project', action='store_true', default=False,
                   help='Expand the projection P_m(f) of the symbol -f in the basis')

    p = sub.add_parser('norms', help='Exact squared norms along a ray',
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _common(p, symbols=False, op=True)
    _ray_args(p)

    p = sub.add_parser('fit', help='Fit the amplitude growth exponent of ||op e_alpha(t)||',
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _common(p, symbols=False, op=True)
    _ray_args(p)
    p.add_argument('--input', type=str, default=None,
                   help='Read samples from a norms CSV ("-" for stdin) instead of sweeping --op')
    p.add_argument('--ratio-from', type=int, default=1024, help='Smallest t used in the ratio test')

    p = sub.add_parser('verify', help='Verification suites',
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument('suite', choices=SUITES)
    _common(p, symbols=False)
    p.add_argument('--quick', action='store_true', default=False, help='Reduced grids')
    return parser


def effective_settings(args: argparse.Namespace, env=None) -> config.Settings:
    """config file and env first, CLI flags on top; FOCKOP_SEED still wins over --seed"""
    env = os.environ if env is None else env
    settings = config.get_settings(env)
    overrides = {}
    if args.seed is not None and not env.get(f'{config.ENV_PREFIX}SEED'):
        overrides['seed'] = args.seed
    if args.samples is not None:
        overrides['samples'] = args.samples
    if args.jobs is not None:
        overrides['jobs'] = args.jobs
    if args.tol is not None:
        key = 'quad_tol' if args.command == 'verify' else 'fit_tol'
        overrides[key] = args.tol
    return replace(settings, **overrides)


# ----------------------------------------------------------------- helpers

def _require(args: argparse.Namespace, *names: str):
    for name in names:
        if getattr(args, name, None) in (None, ''):
            flag = f'--{name}' if len(name) > 1 else f'-{name}'
            raise PreconditionError(f'{args.command} needs {flag}')


def _expansion_rows(v: BasisExpansion) -> typing.List[typing.Dict[str, str]]:
    return [{'eta': format_multiindex(k), **radical_to_dict(c)} for k, c in v.items]


def _ray(args: argparse.Namespace, expr, sp: SpaceParams) -> RaySpec:
    t_values = parse_t_range(args.t_range)
    base = parse_multiindex(args.base, sp.n) if args.base else expression_base(expr)
    direction = parse_direction(args.ray, sp.n)
    return RaySpec(base, direction, t_values)


def _ray_inputs(ray: RaySpec) -> typing.Dict[str, typing.Any]:
    return {'base': format_multiindex(ray.base), 'direction': format_multiindex(ray.direction),
            't': list(ray.t_values)}


def _prediction_outputs(prediction) -> typing.Dict[str, typing.Any]:
    if prediction is None:
        return {'predicted_exponent': None}
    return {
        'predicted_exponent': format_rational(prediction.exponent) if prediction.exponent is not None else None,
        'degenerate': prediction.degenerate,
        'weight_correction': prediction.weight_correction,
        'asserted': prediction.asserted,
        'note': prediction.note,
    }


# ----------------------------------------------------------------- commands

def cmd_parse(args, settings, report: RunReport):
    if not (args.f or args.g or args.op):
        raise PreconditionError('parse needs -f, -g or --op')
    for name in ('f', 'g'):
        text = getattr(args, name)
        if not text:
            continue
        p = parse_symbol(text, args.n)
        report.inputs[name] = text
        holo, rest = holomorphic_split(p)
        report.outputs[name] = {
            'canonical': pretty_print(p),
            'terms': [{'beta': format_multiindex(b), 'gamma': format_multiindex(g), 'coeff': format_gaussian(c)}
                      for (b, g), c in p.items],
            'holomorphic': is_holomorphic(p),
            'constant': is_constant(p),
            'holomorphic_part': pretty_print(holo),
            'remainder': pretty_print(rest),
        }
    if args.op:
        report.inputs['op'] = args.op
        report.outputs['op'] = {'canonical': str(parse_operator(args.op, args.n))}


def cmd_classify(args, settings, report: RunReport):
    kind = Kind(args.kind)
    _require(args, 'f')
    pair = kind in (Kind.TOEPLITZ_PRODUCT, Kind.HANKEL_PRODUCT)
    if pair:
        _require(args, 'g')
    f = parse_symbol(args.f, args.n)
    g = parse_symbol(args.g, args.n) if pair else None
    report.inputs.update({'kind': kind.value, 'f': pretty_print(f)})
    if g is not None:
        report.inputs['g'] = pretty_print(g)
    verdict = classify(kind, f, g)
    report.outputs.update({
        kind.property_name: verdict.bounded,
        'case': verdict.case.value,
        'witness': verdict.witness,
    })
    logger.info(f'{kind.value}: {kind.property_name}={verdict.bounded} ({verdict.case.value})')
    if args.corroborate:
        sp = SpaceParams(args.n, args.m)
        expr = verdict_operator(kind, f, g)
        ray = _ray(args, expr, sp)
        samples = norm_sweep(expr, sp, ray, settings.jobs)
        check = corroborate(verdict, samples, settings)
        report.inputs['ray'] = _ray_inputs(ray)
        report.outputs['corroboration'] = {
            'agrees': check.agrees,
            'growth': check.growth,
            'fitted_exponent': check.fitted_exponent,
            'witness': check.witness,
        }


def cmd_apply(args, settings, report: RunReport):
    sp = SpaceParams(args.n, args.m)
    if args.project:
        _require(args, 'f')
        f = parse_symbol(args.f, args.n)
        report.inputs['f'] = pretty_print(f)
        image = BasisExpansion.zero(sp)
        for (beta, gamma), c in f.items:
            image = image + projection_apply(beta, gamma, sp).scale(c)
        report.outputs.update({'projection': _expansion_rows(image), 'squared_norm': format_rational(squared_norm(image))})
        return
    _require(args, 'op')
    expr = parse_operator(args.op, args.n)
    report.inputs['op'] = str(expr)
    if args.matrix is not None:
        if args.matrix < 0:
            raise PreconditionError(f'--matrix order must be nonnegative, got {args.matrix}')
        report.inputs['max_order'] = args.matrix
        report.columns = ('alpha', 'eta', 'rational', 'radicand')
        for alpha, eta, coeff in finite_section(expr, sp, args.matrix):
            report.add_row(alpha=format_multiindex(alpha), eta=format_multiindex(eta), **radical_to_dict(coeff))
        return
    _require(args, 'alpha')
    alpha = parse_multiindex(args.alpha, sp.n)
    coeff = parse_rational(args.coeff)
    report.inputs.update({'alpha': format_multiindex(alpha), 'coeff': format_rational(coeff)})
    image = apply_operator(expr, basis_vector(alpha, sp, coeff))
    report.outputs.update({'image': _expansion_rows(image), 'squared_norm': format_rational(squared_norm(image))})


def cmd_norms(args, settings, report: RunReport):
    _require(args, 'op')
    sp = SpaceParams(args.n, args.m)
    expr = parse_operator(args.op, args.n)
    ray = _ray(args, expr, sp)
    report.inputs.update({'op': str(expr), 'ray': _ray_inputs(ray)})
    report.columns = ('t', 'alpha', 'squared_norm')
    for s in norm_sweep(expr, sp, ray, settings.jobs):
        report.add_row(t=s.t, alpha=format_multiindex(s.alpha), squared_norm=format_rational(s.squared_norm))


def _fit_outputs(fit, settings) -> typing.Dict[str, typing.Any]:
    out = {'fitted_exponent': fit.fitted_exponent, 'residual': fit.residual, 'samples': len(fit.samples)}
    out.update(_prediction_outputs(fit.predicted))
    if fit.predicted_exponent is not None:
        out['within_tolerance'] = abs(fit.fitted_exponent - float(fit.predicted_exponent)) <= settings.fit_tol
        out['ratios'] = [{'t': t, 'ratio': r} for t, r in fit.ratios]
        out['ratios_stable'] = all(abs(r - 1) <= settings.ratio_window for _, r in fit.ratios)
    return out


def cmd_fit(args, settings, report: RunReport):
    if args.input:
        if args.input == '-':
            text = sys.stdin.read()
        else:
            with open(args.input) as src:
                text = src.read()
        samples = [(t, parse_rational(v)) for t, v in read_samples_csv(text)]
        report.inputs['input'] = args.input
        fit = fit_exponent(samples)
    else:
        _require(args, 'op')
        sp = SpaceParams(args.n, args.m)
        expr = parse_operator(args.op, args.n)
        ray = _ray(args, expr, sp)
        report.inputs.update({'op': str(expr), 'ray': _ray_inputs(ray)})
        fit = exponent_report(expr, sp, ray, settings.jobs, args.ratio_from)
    report.outputs.update(_fit_outputs(fit, settings))
    logger.info(f'fitted amplitude exponent {fit.fitted_exponent:.4f} (predicted {fit.predicted_exponent})')


def cmd_verify(args, settings, report: RunReport):
    report.inputs['suite'] = args.suite
    report.inputs['quick'] = args.quick
    if args.suite == 'orthonormality':
        result = verify_orthonormality(max_order=4) if args.quick else verify_orthonormality()
    elif args.suite == 'hankel-closed-form':
        result = verify_hankel_closed_form(max_component=1, max_alpha=6) if args.quick else verify_hankel_closed_form()
    else:
        report.inputs.update({'seed': settings.seed, 'samples': settings.samples})
        kw = dict(n1_max_order=6, mc_ms=(0,), mc_max_order=2) if args.quick else {}
        result = verify_oracle(settings, **kw)
    report.outputs.update({
        'passed': result.passed,
        'checked': result.checked,
        'failed': result.failed,
        'failures': list(result.failures),
        'counters': dict(result.counters),
    })


COMMANDS = {
    'parse': cmd_parse,
    'classify': cmd_classify,
    'apply': cmd_apply,
    'norms': cmd_norms,
    'fit': cmd_fit,
    'verify': cmd_verify,
}


def execute(argv: typing.Sequence[str], env=None) -> typing.Tuple[int, typing.Optional[RunReport]]:
    """
    Run one invocation.
    @return: (exit code, report); the report is None when the arguments could not be parsed
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as e:
        return (EXIT_INPUT if e.code else EXIT_OK), None
    if args.debug:
        logging.getLogger().setLevel(logging.DEBUG)
    started = time.perf_counter()
    try:
        settings = effective_settings(args, env)
        report = RunReport(command=shlex.join(argv), fmt=args.format)
        if args.command != 'verify':
            report.space = SpaceParams(args.n, args.m)
        COMMANDS[args.command](args, settings, report)
    except SymbolSyntaxError as e:
        logger.error(f'{args.command}: {e.annotated()}')
        return EXIT_INPUT, None
    except INPUT_ERRORS as e:
        logger.error(f'{args.command}: {e}')
        return EXIT_INPUT, None
    except (ValueError, OSError) as e:
        logger.error(f'{args.command}: {e}')
        return EXIT_INPUT, None
    except InvariantViolation as e:
        logger.error(f'{args.command}: internal invariant violated: {e}')
        return EXIT_INVARIANT, None
    elapsed = time.perf_counter() - started
    logger.info(f'{args.command} finished in {elapsed:.3f}s')
    if args.timing:
        report.timing = elapsed
    return EXIT_OK, report


def main(argv: typing.Sequence[str] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    setup_logging('-d' in argv or '--debug' in argv)
    code, report = execute(argv if argv else ['--help'])
    if report is not None:
        sys.stdout.write(report.render())
    return code


if __name__ == '__main__':
    sys.exit(main())
