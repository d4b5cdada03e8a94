"""
Command line entry point

    hyperbisect [--loglevel N] [--format human|json] COMMAND ...

Commands: gen, bisect, disc, mu, spectral, oracle, check, bench. Reports
are printed as 'key: value' lines or as one JSON object per line.

"""

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field, is_dataclass
from fractions import Fraction

import numpy as np

from . import LOG, STREAM, __version__
from . import bench, checks, cut, disc, fileio, geomprob, hypergraph, spectral
from .errors import (
    GeometryError,
    GuardError,
    HyperbisectError,
    HypergraphError,
    NumericError,
)
from .settings import load_settings, save_settings
from .utils import fraction_str, rng_for

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_GUARD = 3
EXIT_NUMERIC = 4

HUMAN = 'human'
JSON = 'json'
STREAMING = ('gen', 'bench')


@dataclass
class RunConfig:
    """Everything a run depends on; recorded in every report"""

    command: str
    input: str | None = None
    seed: int = 0
    trials: int = 200
    alpha: float = 0.05
    mode: str = cut.GREEDY
    degree_factor: float = disc.DEGREE_FACTOR
    threads: int | None = None
    format: str = HUMAN
    options: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace, settings: dict) -> 'RunConfig':
        """Command line values win over settings-file defaults"""

        def pick(key):
            val = getattr(args, key, None)
            return settings[key] if val is None else val

        shared = {
            'loglevel', 'format', 'threads', 'save_settings', 'command',
            'input', 'seed', 'trials', 'alpha', 'mode', 'degree_factor',
        }
        options = {
            key: val for key, val in vars(args).items() if key not in shared
        }
        return cls(
            command=args.command,
            input=getattr(args, 'input', None),
            seed=int(pick('seed')),
            trials=int(pick('trials')),
            alpha=float(pick('alpha')),
            mode=pick('mode'),
            degree_factor=float(pick('degree_factor')),
            threads=pick('threads'),
            format=pick('format'),
            options=options,
        )


def jsonable(obj):
    """
    Report values to JSON types; exact rationals become 'num/den' strings
    and non-finite floats become None

    """

    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, dict):
        return {str(key): jsonable(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(val) for val in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return jsonable(obj.item())
    if is_dataclass(obj):
        return jsonable(asdict(obj))
    return obj


def format_report(report: dict, fmt: str) -> str:
    if fmt == JSON:
        return json.dumps(jsonable(report), allow_nan=False)
    lines = []
    for key, val in jsonable(report).items():
        if isinstance(val, dict):
            val = ', '.join(f"{k}={v}" for k, v in val.items())
        lines.append(f"{key}: {val}")
    return '\n'.join(lines)


def _provenance(config: RunConfig) -> dict:
    return {'version': __version__, 'config': asdict(config)}


def _load(config: RunConfig):
    if not config.input:
        raise HypergraphError("no input hypergraph given (use -i PATH)")
    if config.input.endswith('.json') or config.input.endswith('.json.gz'):
        return fileio.load_json(config.input)
    return fileio.read_hypergraph(config.input)


def _cut_report(res: cut.CutResult) -> dict:
    return {
        'X': list(res.X),
        'Y': list(res.Y),
        'cross': res.cross,
        'objective': res.objective,
        'baseline': res.baseline,
        'baseline_float': float(res.baseline) if res.baseline is not None else None,
        'advantage': res.advantage,
        'method': res.method,
        'trial': res.trial,
    }


def _disc_report(rep: disc.DiscReport) -> dict:
    return {
        'method': rep.method,
        'witness': list(rep.witness),
        'value': rep.value,
        'disc_plus': rep.disc_plus,
        'disc_minus': rep.disc_minus,
        'disc': rep.disc,
        'splits': list(rep.splits),
        'extras': rep.extras,
    }


def cmd_gen(config: RunConfig) -> tuple[dict, int]:
    opts = config.options
    if opts['regular']:
        h = hypergraph.gen_random_regular(
            opts['n'], opts['r'], opts['d'], seed=config.seed,
        )
    else:
        h = hypergraph.gen_random_binomial(
            opts['n'], opts['r'], opts['p'], seed=config.seed,
        )

    out = opts['output']
    if out:
        if out.endswith('.json') or out.endswith('.json.gz'):
            fileio.dump_json(h, out)
        else:
            fileio.write_hypergraph(h, out)
    else:
        sys.stdout.write(fileio.format_hypergraph(h))

    summary = hypergraph.degrees(h)
    return {
        'n': h.n, 'r': h.r, 'edges': h.nedges, 'd': summary.d,
        'delta': summary.delta, 'output': out,
    }, EXIT_OK


def cmd_bisect(config: RunConfig) -> tuple[dict, int]:
    h = _load(config)
    start = time.perf_counter()
    kwargs = dict(
        trials=config.trials, alpha=config.alpha, seed=config.seed,
        mode=config.mode, threads=config.threads,
    )
    if config.options.get('mixed'):
        if not isinstance(h, hypergraph.MixedHypergraph):
            h = hypergraph.MixedHypergraph(h.n, h.edges, h.multiplicities, max_size=h.r)
        res = cut.bisect_mixed(h, **kwargs)
    else:
        res = cut.bisect(h, **kwargs)

    report = _cut_report(res)
    if config.options.get('timing', True):
        report['wall'] = time.perf_counter() - start
    return report, EXIT_OK


def cmd_disc(config: RunConfig) -> tuple[dict, int]:
    h = _load(config)
    opts = config.options
    if opts.get('exhaustive'):
        rep = disc.disc_exact(h)
    elif opts.get('reduction'):
        rep = disc.large_degree_reduction(
            h, C=config.degree_factor, seed=config.seed, trials=config.trials,
            alpha=config.alpha, threads=config.threads,
        )
    else:
        rep = disc.disc_plus_heuristic(
            h, trials=config.trials, alpha=config.alpha, seed=config.seed,
            threads=config.threads,
        )
    report = _disc_report(rep)
    report['value_float'] = float(rep.value)
    return report, EXIT_OK


def cmd_mu(config: RunConfig) -> tuple[dict, int]:
    opts = config.options
    trials = opts.get('mc_trials') or 10**6
    if opts.get('bracket'):
        rep = geomprob.mu_bracket_check(
            opts['bracket'], opts['samples'], trials, seed=config.seed,
            alpha_test=opts['alpha_test'], threads=config.threads,
        )
        return asdict(rep), EXIT_OK if rep.ok else EXIT_FAILED

    if opts.get('angle') is not None:
        vs = geomprob.VectorTuple.from_angle(opts['angle'])
        exact = geomprob.mu_exact_r2(opts['angle'])
    elif opts.get('gram'):
        vs = geomprob.VectorTuple.from_gram(fileio.read_gram(opts['gram']))
        exact = None
    else:
        raise GeometryError("give a Gram matrix file (--gram) or --angle")

    est = geomprob.mu_estimate(vs, trials, seed=config.seed, threads=config.threads)
    report = {
        'mu': est.mu,
        'stderr': est.stderr,
        'trials': est.trials,
        'reduced': geomprob.reduce_to_r_dims(vs).vectors,
    }
    if exact is not None:
        report['exact'] = exact
    return report, EXIT_OK


def cmd_spectral(config: RunConfig) -> tuple[dict, int]:
    h = _load(config)
    opts = config.options
    p = opts['p'] if opts.get('p') is not None else float(h.r)

    witness = disc.disc_plus_heuristic(
        h, trials=config.trials, alpha=config.alpha, seed=config.seed,
        threads=config.threads,
    ) if h.nedges else None
    sets = [witness.witness] if witness and witness.witness else []

    common = dict(
        p=p, sets=sets, exhaustive=opts.get('exhaustive', False),
        seed=config.seed, threads=config.threads,
    )
    if opts['kind'] == spectral.MU:
        cert = spectral.mu_certificate(h, mode=opts.get('spectral_mode'), **common)
    else:
        cert = spectral.lambda2_certificate(h, **common)
        starts = [cert.x]
        for k in range(1, opts.get('starts') or 1):
            x = rng_for(config.seed, 2, k).standard_normal(h.n)
            starts.append(x / spectral.pnorm(x, p))
        for x0 in starts:
            if opts.get('ascent_steps'):
                out = spectral.local_ascent(h, p, x0, steps=opts['ascent_steps'])
                if out.value > cert.value:
                    cert = out

    report = {
        'kind': cert.kind,
        'p': p,
        'value': cert.value,
        'label': cert.label,
        'witness': list(cert.witness) if cert.witness else None,
        'vector': [f"{i}:{v:.12g}" for i, v in cert.pairs()],
    }
    if sets:
        U = witness.witness
        report['disc_witness'] = list(U)
        report['disc_value'] = witness.value
        report['lemma_ok'] = spectral.lemma_bound_check(h, cert, sets)
        # sigma on the characteristic vector of U, from the exact identity
        report['witness_sigma'] = float(
            h.r * witness.value - spectral.lemma_error_term(h, U)
        ) / len(U) ** (h.r / p)
    return report, EXIT_OK


def cmd_oracle(config: RunConfig) -> tuple[dict, int]:
    h = _load(config)
    if config.options['which'] == 'bw':
        return _cut_report(disc.oracle_bw(h, threads=config.threads)), EXIT_OK
    return _disc_report(disc.disc_exact(h)), EXIT_OK


def cmd_check(config: RunConfig) -> tuple[dict, int]:
    opts = config.options
    names = None if opts.get('all') or not opts.get('names') else opts['names']
    results = checks.run_checks(names, n=opts['n'], seed=config.seed)
    report = {res.name: ('ok' if res.passed else 'FAILED: ' + res.detail) for res in results}
    passed = all(res.passed for res in results)
    return report, EXIT_OK if passed else EXIT_FAILED


def cmd_bench(config: RunConfig) -> tuple[dict, int]:
    opts = config.options
    cells = [(n, r, d) for n in opts['sizes'] for r in opts['uniformity'] for d in opts['degrees']]
    seeds = range(config.seed, config.seed + opts['repeats'])
    bench.install_signal_handlers()
    records = bench.bench_sweep(
        cells, seeds, trials=config.trials, alpha=config.alpha, mode=config.mode,
        threads=config.threads, timing=opts['timing'], spectral=opts['spectral'],
    )
    if opts.get('output'):
        with open(opts['output'], 'w') as fid:
            bench.write_jsonl(records, fid, timing=opts['timing'])
    else:
        bench.write_jsonl(records, sys.stdout, timing=opts['timing'])

    cancelled = sum(rec.status == bench.CANCELLED for rec in records)
    return {
        'records': len(records),
        'cancelled': cancelled,
        'summary': bench.summarize(records),
    }, EXIT_OK


COMMANDS = {
    'gen': cmd_gen,
    'bisect': cmd_bisect,
    'disc': cmd_disc,
    'mu': cmd_mu,
    'spectral': cmd_spectral,
    'oracle': cmd_oracle,
    'check': cmd_check,
    'bench': cmd_bench,
}


def exit_code(err: Exception) -> int:
    if isinstance(err, GuardError):
        return EXIT_GUARD
    if isinstance(err, NumericError):
        return EXIT_NUMERIC
    # HypergraphError, GeometryError, EmbeddingError and anything else
    return EXIT_USAGE


def run(config: RunConfig) -> tuple[dict, int]:
    """
    Dispatch a configured run

    Returns:
        tuple : (report, exit code); the report carries the version and the
            full config so any record can be reproduced on its own

    """

    try:
        func = COMMANDS[config.command]
    except KeyError:
        raise HyperbisectError(f"unknown command {config.command!r}") from None
    report, code = func(config)
    report.update(_provenance(config))
    return report, code


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(',') if tok]


def parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog='hyperbisect',
        description='Bisection, discrepancy and spectral bounds for hypergraphs',
    )
    top.add_argument('--loglevel', type=int, default=30, help='Set logging level')
    top.add_argument('--format', choices=(HUMAN, JSON), help='Report format')
    top.add_argument('--threads', type=int, help='Worker threads')
    top.add_argument(
        '--save-settings', action='store_true',
        help='Store seed/trials/alpha/mode/format from this run as defaults',
    )
    sub = top.add_subparsers(dest='command', required=True)

    def common(p, need_input=True):
        if need_input:
            p.add_argument('-i', '--input', required=True, help='Hypergraph file')
        p.add_argument('--seed', type=int, help='Master seed')

    def rounding(p):
        p.add_argument('--trials', type=int, help='Number of roundings')
        p.add_argument('--alpha', type=float, help='Embedding constant in (0, 0.1]')

    p = sub.add_parser('gen', help='Generate a random hypergraph')
    common(p, need_input=False)
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument('--regular', action='store_true', help='d-regular by stub matching')
    kind.add_argument('--binomial', action='store_true', help='Each edge with probability p')
    p.add_argument('-n', type=int, required=True, help='Vertex count')
    p.add_argument('-r', type=int, required=True, help='Uniformity')
    p.add_argument('-d', type=int, default=1, help='Degree for --regular')
    p.add_argument('-p', type=float, default=0.1, help='Edge probability for --binomial')
    p.add_argument('-o', '--output', help='Output path; stdout by default')

    p = sub.add_parser('bisect', help='Near-optimal bisection')
    common(p)
    rounding(p)
    p.add_argument('--mode', choices=cut.MODES, help='Balancing mode')
    p.add_argument('--mixed', action='store_true', help='Per-edge-size baseline')
    p.add_argument('--no-timing', dest='timing', action='store_false', help='Omit wall time')

    p = sub.add_parser('disc', help='Discrepancy witness')
    common(p)
    rounding(p)
    p.add_argument('--exhaustive', action='store_true', help='Walk all subsets')
    p.add_argument('--reduction', action='store_true', help='High-degree reduction')
    p.add_argument('--degree-factor', type=float, help='C in the degree threshold C d')

    p = sub.add_parser('mu', help='Half-space probability of unit vectors')
    common(p, need_input=False)
    src = p.add_mutually_exclusive_group()
    src.add_argument('--gram', help='Gram matrix file')
    src.add_argument('--angle', type=float, help='Angle in radians for two vectors')
    src.add_argument('--bracket', type=int, metavar='R', help='Bracket check for R vectors')
    p.add_argument('--trials', dest='mc_trials', type=int, help='Monte-Carlo trials')
    p.add_argument('--samples', type=int, default=20, help='Gram samples for --bracket')
    p.add_argument('--alpha-test', type=float, default=geomprob.ALPHA_TEST,
                   help='Largest off-diagonal for --bracket')

    p = sub.add_parser('spectral', help='Spectral certificates')
    common(p)
    rounding(p)
    p.add_argument('--p', type=float, help='Norm exponent; defaults to r')
    p.add_argument('--kind', choices=(spectral.LAMBDA2, spectral.MU), default=spectral.LAMBDA2)
    p.add_argument('--mode', dest='spectral_mode', choices=(spectral.SPARSE, spectral.DENSE),
                   default=spectral.SPARSE, help='Candidate pool for --kind mu')
    p.add_argument('--ascent-steps', type=int, default=0, help='Gradient steps per start')
    p.add_argument('--starts', type=int, default=1, help='Ascent start points')
    p.add_argument('--exhaustive', action='store_true', help='Every subset as candidate')

    p = sub.add_parser('oracle', help='Brute-force oracles')
    common(p)
    p.add_argument('which', choices=('bw', 'disc'))

    p = sub.add_parser('check', help='Run identity suites')
    common(p, need_input=False)
    p.add_argument('names', nargs='*', help=f"Suites: {', '.join(checks.CHECKS)}")
    p.add_argument('--all', action='store_true', help='Run every suite')
    p.add_argument('-n', type=int, default=12, help='Vertex count of test instances')

    p = sub.add_parser('bench', help='Sweep random regular instances')
    common(p, need_input=False)
    rounding(p)
    p.add_argument('--mode', choices=cut.MODES, help='Balancing mode')
    p.add_argument('-n', dest='sizes', type=_int_list, default=[300], help='Comma list of n')
    p.add_argument('-r', dest='uniformity', type=_int_list, default=[3], help='Comma list of r')
    p.add_argument('-d', dest='degrees', type=_int_list, default=[4, 16], help='Comma list of d')
    p.add_argument('--repeats', type=int, default=5, help='Seeds per cell')
    p.add_argument('--spectral', action='store_true', help='Record lambda2 certificates')
    p.add_argument('--no-timing', dest='timing', action='store_false', help='Omit wall time')
    p.add_argument('-o', '--output', help='JSON-lines output; stdout by default')

    return top


def cli(argv=None):
    args = parser().parse_args(argv)

    STREAM.setLevel(args.loglevel)
    LOG.addHandler(STREAM)
    log = logging.getLogger(__name__)

    settings = load_settings()
    config = RunConfig.from_args(args, settings)
    if args.save_settings:
        save_settings({
            **settings,
            'seed': config.seed, 'trials': config.trials, 'alpha': config.alpha,
            'mode': config.mode, 'format': config.format,
            'threads': config.threads, 'degree_factor': config.degree_factor,
        })

    try:
        report, code = run(config)
    except HyperbisectError as err:
        log.error("%s", err)
        sys.exit(exit_code(err))
    except (OSError, ValueError, KeyError) as err:
        log.error("%s", err)
        sys.exit(EXIT_USAGE)

    # gen and bench write their data to stdout unless -o is given
    out = sys.stdout
    if config.command in STREAMING and not config.options.get('output'):
        out = sys.stderr
    print(format_report(report, config.format), file=out)
    if code == EXIT_OK and any(
        isinstance(val, float) and not math.isfinite(val) for val in report.values()
    ):
        log.error("Non-finite value in report")
        code = EXIT_NUMERIC
    sys.exit(code)
