"""Проверка аналитических градиентов центральными разностями.

Обе стороны считаются в float64: вход приводится к float64, и все операции,
в которые он попадает, наследуют этот тип.
"""

from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, Field

from src.core.constants import GRAD_CHECK_ABS_FLOOR, GRAD_CHECK_STEP, GRAD_CHECK_TOLERANCE
from src.engine.tensor import Tensor
from src.shared.errors import NonFiniteError, ShapeMismatchError


class GradCheckReport(BaseModel):
    """Результат проверки градиента."""

    max_rel_error: float = Field(..., description="Максимальная относительная ошибка")
    max_abs_error: float = Field(..., description="Максимальная абсолютная ошибка")
    worst_index: list[int] = Field(default_factory=list, description="Координата с максимальной ошибкой")
    checked: int = Field(..., description="Количество проверенных координат")
    tolerance: float = Field(..., description="Порог относительной ошибки")
    passed: bool = Field(..., description="max_rel_error < tolerance")


def _scalar(value: Tensor, where: str) -> float:
    if value.size != 1:
        raise ShapeMismatchError(
            op="grad_check",
            shapes=[value.shape],
            message="Проверяемая функция должна возвращать скаляр",
        )
    result = float(value.data.reshape(-1)[0])
    if not np.isfinite(result):
        raise NonFiniteError(where=where)
    return result


def grad_check(
    op: Callable[[Tensor], Tensor],
    x: Tensor | np.ndarray,
    tol: float = GRAD_CHECK_TOLERANCE,
    step: float = GRAD_CHECK_STEP,
    max_checks: int | None = None,
) -> GradCheckReport:
    """Сравнить градиент op в точке x с центральными разностями.

    Относительная ошибка координаты: |a − n| / max(|a|, |n|, 1e-4).

    Args:
        op: Скалярная дифференцируемая функция одного тензора
        x: Точка проверки
        tol: Порог максимальной относительной ошибки
        step: Шаг h центральной разности (f(x+h) − f(x−h)) / 2h
        max_checks: Проверять только столько координат с наибольшим |градиентом|

    Returns:
        GradCheckReport; passed = max_rel_error < tol

    Raises:
        NonFiniteError: op вернула NaN/Inf

    """
    base = np.array(x.data if isinstance(x, Tensor) else x, dtype=np.float64)

    probe = Tensor(base.copy(), requires_grad=True)
    value = op(probe)
    _scalar(value, "grad_check.forward")
    value.backward()
    analytic = probe.grad if probe.grad is not None else np.zeros_like(base)

    flat_analytic = analytic.reshape(-1)
    if max_checks is not None and max_checks < flat_analytic.size:
        # stable сортировка: при равных |градиентах| берутся первые координаты
        indices = np.argsort(-np.abs(flat_analytic), kind="stable")[:max_checks]
    else:
        indices = np.arange(flat_analytic.size)

    max_rel = 0.0
    max_abs = 0.0
    worst = 0
    for flat_index in indices:
        shifted = base.copy().reshape(-1)
        shifted[flat_index] = base.reshape(-1)[flat_index] + step
        f_plus = _scalar(op(Tensor(shifted.reshape(base.shape))), "grad_check.plus")
        shifted[flat_index] = base.reshape(-1)[flat_index] - step
        f_minus = _scalar(op(Tensor(shifted.reshape(base.shape))), "grad_check.minus")

        numeric = (f_plus - f_minus) / (2.0 * step)
        exact = float(flat_analytic[flat_index])
        abs_error = abs(exact - numeric)
        rel_error = abs_error / max(abs(exact), abs(numeric), GRAD_CHECK_ABS_FLOOR)
        max_abs = max(max_abs, abs_error)
        if rel_error > max_rel:
            max_rel = rel_error
            worst = int(flat_index)

    return GradCheckReport(
        max_rel_error=max_rel,
        max_abs_error=max_abs,
        worst_index=[int(i) for i in np.unravel_index(worst, base.shape)] if base.size else [],
        checked=int(len(indices)),
        tolerance=tol,
        passed=max_rel < tol,
    )
