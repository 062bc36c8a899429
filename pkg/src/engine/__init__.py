"""Тензорное ядро: тензоры, дифференцируемые операции, RNG и проверка градиентов."""

from src.engine.functional import (
    add,
    batchnorm,
    bias_add,
    conv2d,
    dropout,
    flatten,
    global_avg_pool,
    matmul,
    maxpool2d,
    relu,
    reshape,
    softmax,
    softmax_xent,
    tensor_sum,
)
from src.engine.gradcheck import GradCheckReport, grad_check
from src.engine.rng import Rng
from src.engine.tensor import Function, Tensor

__all__ = [
    "Function",
    "GradCheckReport",
    "Rng",
    "Tensor",
    "add",
    "batchnorm",
    "bias_add",
    "conv2d",
    "dropout",
    "flatten",
    "global_avg_pool",
    "grad_check",
    "matmul",
    "maxpool2d",
    "relu",
    "reshape",
    "softmax",
    "softmax_xent",
    "tensor_sum",
]
