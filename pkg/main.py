import argparse

from config import DEFAULT_CONFIG
from finite_horizon import cmd_finite
from stationary import cmd_stationary, cmd_theta_sweep, cmd_r_sweep, cmd_ergodicity
from simulation import cmd_nplayer, cmd_oracle_compare

parser = argparse.ArgumentParser()

subparsers = parser.add_subparsers(metavar="command")


def add_common_arguments(parser):
    parser.add_argument("-c", "--config", type=str, default=DEFAULT_CONFIG)
    parser.add_argument("-o", "--out", type=str, default=None)
    parser.add_argument("-j", "--threads", type=int, default=None)
    parser.add_argument("-s", "--seed", type=int, default=None)


parser_finite = subparsers.add_parser(
    "finite",
    help="Finite-horizon mean field equilibrium by damped fixed-point iteration",
)
add_common_arguments(parser_finite)
parser_finite.set_defaults(func=cmd_finite)

parser_stationary = subparsers.add_parser(
    "stationary",
    help="Stationary equilibrium (z, theta, pi) and the uniqueness scan of h(z)",
)
add_common_arguments(parser_stationary)
parser_stationary.set_defaults(func=cmd_stationary)

parser_theta_sweep = subparsers.add_parser(
    "theta-sweep", help="Stationary mean z(theta) over a grid of thresholds"
)
add_common_arguments(parser_theta_sweep)
parser_theta_sweep.add_argument("-t", "--thetas", type=float, nargs="+", default=None)
parser_theta_sweep.set_defaults(func=cmd_theta_sweep)

parser_r_sweep = subparsers.add_parser(
    "r-sweep",
    help="Threshold of the reduced problem as the reset cost r varies, with r bounds",
)
add_common_arguments(parser_r_sweep)
parser_r_sweep.add_argument("-r", "--r-values", type=float, nargs="+", default=None)
parser_r_sweep.set_defaults(func=cmd_r_sweep)

parser_nplayer = subparsers.add_parser(
    "nplayer",
    help="N-player simulation of the mean field equilibrium and empirical epsilon-Nash gaps",
)
add_common_arguments(parser_nplayer)
parser_nplayer.add_argument("-n", "--n-list", type=int, nargs="+", default=None)
parser_nplayer.set_defaults(func=cmd_nplayer)

parser_oracle_compare = subparsers.add_parser(
    "oracle-compare",
    help="Stationary means from power iteration, regenerative cycles and a long path",
)
add_common_arguments(parser_oracle_compare)
parser_oracle_compare.add_argument("-t", "--thetas", type=float, nargs="+", default=None)
parser_oracle_compare.set_defaults(func=cmd_oracle_compare)

parser_ergodicity = subparsers.add_parser(
    "ergodicity",
    help="Total variation distance to the stationary law and fitted geometric rate",
)
add_common_arguments(parser_ergodicity)
parser_ergodicity.add_argument("-t", "--thetas", type=float, nargs="+", default=None)
parser_ergodicity.add_argument("-H", "--horizon", type=int, default=None)
parser_ergodicity.set_defaults(func=cmd_ergodicity)


args = parser.parse_args()

try:
    func = args.func
except AttributeError:
    parser.print_help()
    exit(1)

args = vars(args).copy()
del args["func"]
exit(func(**args))
