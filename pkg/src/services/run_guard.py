"""Run Guard - эксклюзивный доступ к директории запуска.

Lock файл создаётся атомарно (O_CREAT | O_EXCL), поэтому второй процесс
на той же директории запуска получает RunLockedError.
"""

import os
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

from src.core.constants import LOCK_FILE
from src.shared.errors import RunLockedError
from src.shared.logging import get_logger

logger = get_logger()


@contextmanager
def acquire_run_dir(run_dir: Path | str, command: str) -> Iterator[Path]:
    """Захватить директорию запуска на время блока.

    Args:
        run_dir: Директория запуска (создаётся при необходимости)
        command: Имя подкоманды (пишется в lock файл)

    Yields:
        Путь к директории запуска

    Raises:
        RunLockedError: Директория уже занята другим процессом

    Usage:
        with acquire_run_dir(config.paths.run_dir, "train") as run_dir:
            ...

    """
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    lock_path = run_dir / LOCK_FILE

    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY, 0o644)
    except FileExistsError as e:
        holder = lock_path.read_text(encoding="utf-8", errors="replace").strip()
        raise RunLockedError(
            f"Директория запуска занята: {run_dir}",
            details={"run_dir": str(run_dir), "holder": holder},
        ) from e

    with os.fdopen(fd, "w", encoding="utf-8") as f:
        f.write(f"{os.getpid()} {command}\n")
    logger.debug("Lock получен", run_dir=str(run_dir), command=command)

    try:
        yield run_dir
    finally:
        lock_path.unlink(missing_ok=True)
        logger.debug("Lock освобождён", run_dir=str(run_dir))
