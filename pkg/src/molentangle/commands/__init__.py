# src/molentangle/commands/__init__.py

"""Command handlers for molentangle CLI subcommands."""

from .comb import handle_comb_command
from .fit import handle_fit_command
from .init import handle_init_command
from .report import handle_report_command
from .simulate import handle_simulate_command
from .validate import handle_validate_command


__all__ = [
    "handle_comb_command",
    "handle_fit_command",
    "handle_init_command",
    "handle_report_command",
    "handle_simulate_command",
    "handle_validate_command",
]
