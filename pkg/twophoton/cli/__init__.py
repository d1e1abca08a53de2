from . import compute_cli
from . import stream_cli
from .main import command_line_entry_point, help_on_exceptions
