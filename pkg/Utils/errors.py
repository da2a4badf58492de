"""Domain exceptions. Each carries the process exit code the CLI reports."""


class PipelineError(Exception):
    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


# --- configuration / phantom feasibility (exit 2) ---
class ConfigError(PipelineError):
    exit_code = 2


class InfeasibleSpec(PipelineError):
    exit_code = 2


class GAOutOfRange(PipelineError):
    exit_code = 2


class DegenerateDesign(PipelineError):
    exit_code = 2


class AllClassesAbsent(PipelineError):
    exit_code = 2


# --- I/O ---
class VolumeWriteError(PipelineError):
    exit_code = 3


class VolumeReadError(PipelineError):
    exit_code = 4


class MalformedHeader(VolumeReadError):
    pass


class UnsupportedDatatype(VolumeReadError):
    pass


class ObliqueAffine(VolumeReadError):
    pass


class LabelOutOfRange(VolumeReadError):
    pass


class MetadataMismatch(PipelineError):
    exit_code = 5


class UnmappedCode(PipelineError):
    exit_code = 6


# --- library-level conditions ---
class EmptyMask(PipelineError):
    pass


class NoTargetStructure(PipelineError):
    pass


class TopologyError(PipelineError):
    pass
