"""
Command line entry point: synthetic instances, single recoveries, phase-transition grids, sufficient sketch sizes,
bound checks and runtime comparisons.

	sketch-rpca phase --alg alg1 --design red --n1 500 --n2 1000 --rank 5 --rho 0.2 --m1 10:200:10 --m2 10:100:10
	sketch-rpca bounds --theorem 1 --r 5 --n2 1000 --k 200 --mu-v-prime 1 --delta 0.05

Exit status: 0 on success, 1 on invalid input, 2 on any other error.
"""
import argparse
import configparser
import json
import sys

from loguru import logger
from pathlib import Path
from typing import (
	List,
	Optional
)

from sketch_rpca import LOG_FORMAT
from sketch_rpca.configs.configs import (
	BASELINE_TIMEOUT,
	C1,
	C2,
	C_CONCENTRATION,
	DELTA,
	N_JOBS,
	OUTLIER_SIGMA,
	TRIALS
)
from sketch_rpca.custom_types.bounds_types import BoundInputs
from sketch_rpca.custom_types.data_types import CoherenceStats
from sketch_rpca.custom_types.harness_types import GridSpec
from sketch_rpca.exceptions import InvalidParameterError
from sketch_rpca.harness.module.Benchmark import (
	baseline_to_frame,
	run_baseline_comparison
)
from sketch_rpca.harness.module.PhaseTransition import (
	grid_to_frame,
	run_bound_coupling,
	run_phase_transition,
	write_with_provenance
)
from sketch_rpca.matstore.module.MatrixIO import (
	read_instance,
	write_instance
)
from sketch_rpca.matstore.module.Synthetic import generate_synthetic
from sketch_rpca.recovery_functions import (
	run_bounds,
	run_recovery
)

THEOREMS = {
	1: ('alg1', 'red'),
	2: ('alg1', 'rrd'),
	3: ('alg2', 'red'),
	4: ('alg2', 'rrd')
}
CONFIG_SECTION = 'sketch_rpca'


class UsageError(Exception):
	pass


class ArgumentParser(argparse.ArgumentParser):
	"""
	Argument errors raise UsageError instead of exiting with status 2.
	"""
	def error(self, message):
		self.print_usage(sys.stderr)
		raise UsageError(f'{self.prog}: error: {message}')


def int_list(text: str) -> List[int]:
	"""
	"a:b:s" (inclusive of b), "a,b,c" or a single integer.
	"""
	try:
		if ':' in text:
			parts = [int(p) for p in text.split(':')]
			if len(parts) not in (2, 3):
				raise ValueError
			start, stop = parts[0], parts[1]
			step = parts[2] if len(parts) == 3 else 1
			if step < 1:
				raise ValueError
			return list(range(start, stop + 1, step))
		return [int(p) for p in text.split(',') if p.strip()]
	except ValueError:
		raise argparse.ArgumentTypeError(f'"{text}" is not an integer, a list "a,b,c" or a range "start:stop:step"')


def read_config(path: str) -> dict:
	"""
	Flat "key = value" file with "#" comments; dashes and underscores in keys are equivalent.
	"""
	if not Path(path).exists():
		raise InvalidParameterError(f'config file {path} not found')
	parser = configparser.ConfigParser(comment_prefixes=('#',), inline_comment_prefixes=('#',))
	with open(path, 'r') as f:
		parser.read_string(f'[{CONFIG_SECTION}]\n' + f.read())
	return {key.replace('-', '_'): value for key, value in parser[CONFIG_SECTION].items()}


def add_common(parser: argparse.ArgumentParser):
	parser.add_argument('--config', type=str, default=None, help='flat "key = value" file with default flag values')
	verbosity = parser.add_mutually_exclusive_group()
	verbosity.add_argument('--verbose', action='store_true', help='log at DEBUG level')
	verbosity.add_argument('--quiet', action='store_true', help='log warnings and errors only')


def add_instance_flags(parser: argparse.ArgumentParser):
	parser.add_argument('--n1', type=int, default=100)
	parser.add_argument('--n2', type=int, default=200)
	parser.add_argument('--rank', type=int, default=5)
	parser.add_argument('--rho', type=float, default=0.1, help='column outlier probability')
	parser.add_argument('--outlier-sigma', type=float, default=OUTLIER_SIGMA)
	parser.add_argument('--noise-sigma', type=float, default=0.0)
	parser.add_argument('--k', type=int, default=None, help='exact number of outliers (overrides --rho)')


def build_parser() -> ArgumentParser:
	parser = ArgumentParser(prog='sketch-rpca', description='Randomized robust subspace recovery')
	subparsers = parser.add_subparsers(dest='command', required=True)

	generate = subparsers.add_parser('generate', help='write a synthetic instance to a folder')
	add_common(generate)
	add_instance_flags(generate)
	generate.add_argument('--seed', type=int, default=0)
	generate.add_argument('--out', type=str, required=True)

	recover = subparsers.add_parser('recover', help='run one end-to-end recovery and print its verdict')
	add_common(recover)
	add_instance_flags(recover)
	recover.add_argument('--instance', type=str, default=None, help='folder written by "generate"')
	recover.add_argument('--alg', choices=['alg1', 'alg2'], default='alg1')
	recover.add_argument('--design', choices=['red', 'rrd'], default='red')
	recover.add_argument('--m1', type=int, required=True)
	recover.add_argument('--m2', type=int, required=True)
	recover.add_argument('--seed', type=int, default=0)
	recover.add_argument('--lam', type=float, default=None)
	recover.add_argument('--omega', type=float, default=None)
	recover.add_argument('--p-norm', type=int, choices=[1, 2], default=2)
	recover.add_argument('--noise-epsilon', type=float, default=None)
	recover.add_argument('--detection-space', choices=['full_data', 'compressed'], default='full_data')

	phase = subparsers.add_parser('phase', help='phase-transition grid over (m1, m2), written as CSV')
	add_common(phase)
	add_instance_flags(phase)
	phase.add_argument('--alg', choices=['alg1', 'alg2'], default='alg1')
	phase.add_argument('--design', choices=['red', 'rrd'], default='red')
	phase.add_argument('--m1', type=int_list, required=True)
	phase.add_argument('--m2', type=int_list, required=True)
	phase.add_argument('--trials', type=int, default=TRIALS)
	phase.add_argument('--seed', type=int, default=0)
	phase.add_argument('--lam', type=float, default=None)
	phase.add_argument('--clusters', type=int, default=None, help='number of row clusters of a clustered L')
	phase.add_argument('--cluster-dims', type=int, default=1, help='dimension of each cluster subspace')
	phase.add_argument('--n-jobs', type=int, default=N_JOBS)
	phase.add_argument('--out', type=str, default='phase.csv')

	bounds = subparsers.add_parser('bounds', help='sufficient sketch sizes, printed as JSON')
	add_common(bounds)
	bounds.add_argument('--theorem', type=int, choices=sorted(THEOREMS), default=None)
	bounds.add_argument('--alg', choices=['alg1', 'alg2'], default='alg1')
	bounds.add_argument('--design', choices=['red', 'rrd'], default='red')
	bounds.add_argument('--r', type=int, required=True)
	bounds.add_argument('--n1', type=int, default=None, help='defaults to n2')
	bounds.add_argument('--n2', type=int, required=True)
	bounds.add_argument('--k', type=int, required=True)
	bounds.add_argument('--mu-v', type=float, default=1.0)
	bounds.add_argument('--mu-v-prime', type=float, default=1.0)
	bounds.add_argument('--mu-u', type=float, default=1.0)
	bounds.add_argument('--eta-u', type=float, default=1.0)
	bounds.add_argument('--eta-v', type=float, default=1.0)
	bounds.add_argument('--delta', type=float, default=DELTA)
	bounds.add_argument('--c', type=float, default=C_CONCENTRATION)
	bounds.add_argument('--g', type=float, default=None)
	bounds.add_argument('--c1', type=float, default=C1)
	bounds.add_argument('--c2', type=float, default=C2)

	coupling = subparsers.add_parser('coupling', help='empirical success at the sufficient sketch sizes')
	add_common(coupling)
	coupling.add_argument('--n1', type=int, default=20)
	coupling.add_argument('--n2', type=int, default=60)
	coupling.add_argument('--rank', type=int, default=1)
	coupling.add_argument('--k', type=int, default=1)
	coupling.add_argument('--trials', type=int, default=10)
	coupling.add_argument('--delta', type=float, default=0.1)
	coupling.add_argument('--c', type=float, default=C_CONCENTRATION)
	coupling.add_argument('--seed', type=int, default=0)
	coupling.add_argument('--n-jobs', type=int, default=N_JOBS)

	bench = subparsers.add_parser('bench', help='randomized vs. full-data runtimes, written as CSV')
	add_common(bench)
	bench.add_argument('--sizes', type=int_list, required=True)
	bench.add_argument('--rank', type=int, default=20)
	bench.add_argument('--rho', type=float, default=0.01)
	bench.add_argument('--m1', type=int, required=True)
	bench.add_argument('--m2', type=int, required=True)
	bench.add_argument('--trials', type=int, default=3)
	bench.add_argument('--design', choices=['red', 'rrd'], default='red')
	bench.add_argument('--timeout', type=float, default=BASELINE_TIMEOUT)
	bench.add_argument('--seed', type=int, default=0)
	bench.add_argument('--out', type=str, default='bench.csv')

	parser.subparsers = subparsers
	return parser


def config_value(action: argparse.Action, value: str, path: str):
	"""
	Checks a config file value against its flag: switches take a boolean word, flags with choices one of them.
	"""
	if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
		states = configparser.ConfigParser.BOOLEAN_STATES
		if value.lower() not in states:
			raise InvalidParameterError(f'{action.dest} = {value} in {path} is not a boolean')
		return states[value.lower()]
	if action.choices is not None:
		try:
			converted = action.type(value) if action.type is not None else value
		except (TypeError, ValueError, argparse.ArgumentTypeError):
			raise InvalidParameterError(f'{action.dest} = {value} in {path} cannot be converted')
		if converted not in action.choices:
			raise InvalidParameterError(
				f'{action.dest} = {value} in {path} is not one of {", ".join(map(str, action.choices))}')
	return value


def parse_arguments(parser: ArgumentParser, argv: List[str]) -> argparse.Namespace:
	"""
	With --config, file values become the subcommand defaults and explicit flags override them.
	"""
	pre_parser = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
	pre_parser.add_argument('--config', type=str, default=None)
	known, _ = pre_parser.parse_known_args(argv)
	command = next((arg for arg in argv if arg in parser.subparsers.choices), None)
	if known.config is None or command is None:
		return parser.parse_args(argv)

	values = read_config(known.config)
	subparser = parser.subparsers.choices[command]
	known_keys = {action.dest for action in subparser._actions}
	unknown = sorted(set(values) - known_keys)
	if unknown:
		raise InvalidParameterError(f'unknown keys in {known.config}: {", ".join(unknown)}')
	for action in subparser._actions:
		if action.dest in values:
			action.required = False
			values[action.dest] = config_value(action, values[action.dest], known.config)
	# string defaults go through each action's type conversion
	subparser.set_defaults(**values)
	return parser.parse_args(argv)


def configure_logging(args: argparse.Namespace):
	level = 'DEBUG' if args.verbose else 'WARNING' if args.quiet else 'INFO'
	logger.configure(handlers=[{'sink': sys.stderr, 'format': LOG_FORMAT, 'level': level}])


def instance_from_args(args: argparse.Namespace, seed: int):
	return generate_synthetic(
		args.n1, args.n2, args.rank, args.rho,
		outlier_sigma=args.outlier_sigma,
		noise_sigma=args.noise_sigma,
		seed=seed,
		fixed_outlier_count=args.k
	)


def print_json(obj):
	json.dump(obj, sys.stdout, indent=2, default=str)
	sys.stdout.write('\n')


def command_generate(args: argparse.Namespace):
	instance = instance_from_args(args, args.seed)
	print_json(write_instance(instance, args.out))


def command_recover(args: argparse.Namespace):
	instance = read_instance(args.instance) if args.instance else instance_from_args(args, args.seed)
	backpack = {
		'algorithm': args.alg,
		'design': args.design,
		'm1': args.m1,
		'm2': args.m2,
		'seed': args.seed,
		'p_norm': args.p_norm,
		'detection_space': args.detection_space
	}
	for key in ('lam', 'omega', 'noise_epsilon'):
		if getattr(args, key) is not None:
			backpack[key] = getattr(args, key)
	outputs = run_recovery(instance, backpack)
	if outputs['verdict'] is not None:
		print_json(outputs['verdict'])
	else:
		print_json({'est_rank': outputs['est_rank'], 'outlier_indices': outputs['outlier_indices']})


def command_phase(args: argparse.Namespace):
	params = {
		'n1': args.n1,
		'n2': args.n2,
		'rank': args.rank,
		'outlier_prob': args.rho,
		'outlier_sigma': args.outlier_sigma,
		'noise_sigma': args.noise_sigma
	}
	if args.k is not None:
		params['fixed_outlier_count'] = args.k
	clustered = None
	if args.clusters is not None:
		clustered = {'n_clusters': args.clusters, 'per_cluster_dims': args.cluster_dims}
	spec = GridSpec(
		m1_values=args.m1,
		m2_values=args.m2,
		instance_params=params,
		algorithm=args.alg,
		design=args.design,
		trials=args.trials,
		base_seed=args.seed,
		lam=args.lam,
		clustered=clustered
	)
	result = run_phase_transition(spec, n_jobs=args.n_jobs)
	write_with_provenance(grid_to_frame(spec, result), args.out, result.metadata)
	logger.info(f'grid written to {args.out}')


def command_bounds(args: argparse.Namespace):
	algorithm, design = THEOREMS[args.theorem] if args.theorem is not None else (args.alg, args.design)
	coherence = CoherenceStats(
		mu_v=args.mu_v,
		mu_v_prime=args.mu_v_prime,
		mu_u=args.mu_u,
		eta_v=args.eta_v,
		eta_u=args.eta_u,
		gamma=args.mu_v_prime,
		rank_used=args.r
	)
	inputs = BoundInputs(
		r=args.r,
		n1=args.n1 if args.n1 is not None else args.n2,
		n2=args.n2,
		n2_prime=args.n2 - args.k,
		k=args.k,
		coherence=coherence,
		delta=args.delta,
		c=args.c,
		g=args.g,
		c1=args.c1,
		c2=args.c2
	)
	print_json(run_bounds(inputs, algorithm, design).to_dict())


def command_coupling(args: argparse.Namespace):
	print_json(run_bound_coupling(
		args.n1, args.n2, args.rank, args.k, args.trials, args.delta, c=args.c, base_seed=args.seed,
		n_jobs=args.n_jobs))


def command_bench(args: argparse.Namespace):
	rows = run_baseline_comparison(
		args.sizes, args.rank, args.rho, args.m1, args.m2, args.trials, design=args.design, timeout=args.timeout,
		base_seed=args.seed)
	metadata = {key: value for key, value in vars(args).items() if key not in ('verbose', 'quiet')}
	metadata['runtime_note'] = 'runtimes are wall-clock; compare speedup ratios, not seconds'
	write_with_provenance(baseline_to_frame(rows), args.out, metadata)
	logger.info(f'timings written to {args.out}')


COMMANDS = {
	'generate': command_generate,
	'recover': command_recover,
	'phase': command_phase,
	'bounds': command_bounds,
	'coupling': command_coupling,
	'bench': command_bench
}


def main(argv: Optional[List[str]] = None) -> int:
	argv = sys.argv[1:] if argv is None else list(argv)
	parser = build_parser()
	try:
		args = parse_arguments(parser, argv)
		configure_logging(args)
		COMMANDS[args.command](args)
	except (UsageError, InvalidParameterError) as e:
		logger.error(str(e))
		return 1
	except Exception as e:
		logger.exception(f'internal error: {e}')
		return 2
	return 0


if __name__ == '__main__':
	sys.exit(main())
