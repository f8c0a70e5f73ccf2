"""Exception types shared across the toolkit."""

from __future__ import annotations


class CadKitError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(CadKitError):
    """A JSON document does not match the sketch-extrude schema."""

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class GeometryError(CadKitError):
    """A document is schema-valid but geometrically inconsistent."""

    def __init__(self, path: str, reason: str = ""):
        super().__init__(f"{path}: {reason}" if reason else path)
        self.path = path
        self.reason = reason


class QuantizeError(CadKitError):
    """Value cannot be quantized (NaN) or bin is out of range."""


class TruncationError(CadKitError):
    """Flattened command count exceeds the fixed sequence length."""

    def __init__(self, count: int, limit: int):
        super().__init__(f"sequence has {count} commands, limit is {limit}")
        self.count = count
        self.limit = limit


class StructureError(CadKitError):
    """A command vector cannot be decoded into a well-formed model."""


class DegenerateArcError(GeometryError):
    """Three-point arc with (near-)colinear or coincident points."""


class SelfIntersectionError(GeometryError):
    """A sketch loop intersects itself."""


class EmptySolidError(CadKitError):
    """A solid has no boundary (e.g. a body fully cut away)."""


class TriangulationError(CadKitError):
    """A profile could not be triangulated."""


class UnsupportedFeatureError(CadKitError):
    """Model uses a construct outside the supported command set."""

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class StlFormatError(CadKitError):
    """Malformed STL payload (truncated record, count mismatch, ...)."""


class ZeroExtentError(CadKitError):
    """Mesh or solid is degenerate in every axis; cannot normalize."""


class EmptyMeshError(CadKitError):
    """Operation requires a mesh with at least one triangle."""


class AllInvalidError(CadKitError):
    """Every sample in a batch failed; no geometric aggregate exists."""


class TemplateMissingError(CadKitError):
    """A bundled prompt template file is missing."""


class TooFewSamplesError(CadKitError):
    """Dataset too small to split into nonempty train/val/test."""


class RateLimitedError(CadKitError):
    """Remote service rejected the request due to rate limiting."""

    def __init__(self, retry_after: float):
        super().__init__(f"rate limited, retry after {retry_after:.1f}s")
        self.retry_after = retry_after


class SandboxUnavailableError(CadKitError):
    """The script-execution runner could not be reached."""


class LlmTransportError(CadKitError):
    """LLM endpoint unreachable or persistently erroring."""


class UnknownKeyWarning(UserWarning):
    """Unrecognized key in an input JSON document (ignored)."""


class ClampWarning(UserWarning):
    """A value outside the normalized range was clamped before quantizing."""


class NonWatertightWarning(UserWarning):
    """Mesh is not watertight; occupancy fell back to winding numbers."""


class ConservativeMeshWarning(UserWarning):
    """Per-primitive meshing of a Cut/Intersect solid is approximate."""
