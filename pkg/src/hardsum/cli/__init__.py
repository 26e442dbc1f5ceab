"""Command-line interface: instance generation, metered runs, verification."""
from .config import RunConfig
from .main import cmd_gen, cmd_run, cmd_verify, main

__all__ = ["RunConfig", "main", "cmd_gen", "cmd_run", "cmd_verify"]
