"""Loop-dispatch abstraction: policies, parallel patterns, profiling, counting."""

from .counting import CountingArray, CountingScalar, Tally
from .dispatch import (
    KernelCount,
    UnsupportedKernelError,
    count_kernel_ops,
    counting,
    device,
    kernel,
    max_op,
    min_op,
    par_for,
    par_reduce,
    sum_op,
    tree_combine,
)
from .policy import LoopBounds, LoopPolicy, Pattern, decode_flat_index, iter_chunks
from .profiling import KernelProfile, Profiler, active_profiler, region, set_profiler, with_region

__all__ = [
    "CountingArray", "CountingScalar", "Tally", "KernelCount", "UnsupportedKernelError",
    "count_kernel_ops", "counting", "device", "kernel", "max_op", "min_op", "par_for",
    "par_reduce", "sum_op", "tree_combine", "LoopBounds", "LoopPolicy", "Pattern",
    "decode_flat_index", "iter_chunks", "KernelProfile", "Profiler", "active_profiler",
    "region", "set_profiler", "with_region",
]
