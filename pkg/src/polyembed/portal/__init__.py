from .cli import cli_run
from .tasks import TaskDescriptor, compatible_tasks, load_tasks, run_task

__all__ = ["TaskDescriptor", "cli_run", "compatible_tasks", "load_tasks", "run_task"]
