"""Форматтеры Loguru: JSON строки для production и цветной текст для разработки."""

from typing import Any

import orjson

_HIDDEN_CONSOLE_FIELDS = frozenset({"run_id", "command", "name", "_json"})


def _default(value: Any) -> Any:
    """Значения, которые orjson не сериализует сам (Path, Enum, numpy scalar)."""
    if hasattr(value, "item"):
        return value.item()
    if hasattr(value, "value"):
        return value.value
    return str(value)


def json_formatter(record: dict[str, Any]) -> str:
    """Запись Loguru в одну JSON строку.

    Поля: timestamp, level, logger, function, line, message, затем run_id
    и остальные extra поля в порядке добавления, exception при наличии.
    """
    extra = {key: value for key, value in record.get("extra", {}).items() if key != "_json"}
    entry: dict[str, Any] = {
        "timestamp": record["time"].isoformat(),
        "level": record["level"].name,
        "logger": record["name"],
        "function": record["function"],
        "line": record["line"],
        "message": record["message"],
    }
    if "run_id" in extra:
        entry["run_id"] = extra.pop("run_id")
    entry.update(extra)

    exception = record["exception"]
    if exception is not None:
        entry["exception"] = {
            "type": exception.type.__name__ if exception.type else None,
            "value": str(exception.value) if exception.value else None,
        }

    return orjson.dumps(entry, default=_default, option=orjson.OPT_SERIALIZE_NUMPY).decode("utf-8")


def console_formatter(record: dict[str, Any]) -> str:
    """Шаблон строки для разработки.

    2026-01-05 12:34:56.789 | INFO     | module:function:42 | [run_id] - Message | key=value
    """
    extra = record.get("extra", {})
    template = (
        "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | <level>{level: <8}</level> | "
        "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan>"
    )
    if "run_id" in extra:
        template += " | <yellow>[{extra[run_id]}]</yellow>"
    template += " - <level>{message}</level>"

    fields = [key for key in extra if key not in _HIDDEN_CONSOLE_FIELDS]
    if fields:
        template += " | " + " ".join(f"{key}={{extra[{key}]}}" for key in fields)
    template += "\n"
    if record["exception"] is not None:
        template += "{exception}\n"
    return template


def json_sink_formatter(record: dict[str, Any]) -> str:
    """Шаблон sink'а: JSON строка кладётся в extra и печатается как есть."""
    record["extra"]["_json"] = json_formatter(record)
    return "{extra[_json]}\n"
