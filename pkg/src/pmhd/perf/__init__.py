"""Roofline and performance-portability model."""

from .model import (
    UNSUPPORTED,
    EfficiencyAboveOne,
    KernelIntensitySet,
    MeasuredRun,
    PerfDomainError,
    PerfInputError,
    PortabilityInput,
    RooflineCap,
    RooflinePlatform,
    arch_efficiency,
    pp_metric,
    roofline_cap,
    space_cap,
)
from .platforms import (
    PlatformParseError,
    find_platform,
    load_platform_table,
    parse_platform_table,
    reference_measurements,
    reference_platforms,
    write_platform_table,
)
