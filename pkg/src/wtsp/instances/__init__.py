"""Benchmark instance generation and file I/O."""

from .generate import (
    CLASSES,
    PLACEMENTS,
    GeneratorSpec,
    WeightConfig,
    assign_weights,
    generate_instance,
    generate_placement,
    read_manifest,
    stable_seed,
    suite_specs,
    write_manifest,
)
from .tsplib import (
    START_WEIGHT_NOT_ONE,
    WEIGHTS_MISSING,
    InstanceWarning,
    ParseError,
    dumps_instance,
    loads_instance,
    read_instance,
    read_tour,
    write_instance,
    write_tour,
)
