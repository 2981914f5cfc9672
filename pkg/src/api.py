from src.bootstrap.controller import register as register_bootstrap
from src.instruments.controller import register as register_instruments
from src.mc_oracle.controller import register as register_oracle


def register_commands(subparsers):
    register_bootstrap(subparsers)
    register_instruments(subparsers)
    register_oracle(subparsers)
