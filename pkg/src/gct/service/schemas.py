"""Request/response models for the service endpoints."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class TensorPayload(BaseModel):
    semiring: str
    dom: list[int]
    cod: list[int]
    entries: list[list[list[float]]] | list[list[int]]
    text: str


class EvalRequest(BaseModel):
    diagram: str = Field(description="diagram in the gct text format")
    model: Optional[str] = None
    tolerance: Optional[float] = None


class EvalResponse(BaseModel):
    theory: str
    model: str
    tensor: TensorPayload
    pretty: str


class RewriteRequest(BaseModel):
    diagram: str
    strategy: str = Field("fuse", description="fuse | nf | steps")
    rules: Optional[str] = Field(
        None, description="builtin rule set name or rule-file text")
    max_steps: int = 10_000


class RewriteResponse(BaseModel):
    diagram: str
    steps: int
    strategy: str


class LawLine(BaseModel):
    name: str
    passed: bool
    max_deviation: float
    scalar_re: Optional[float] = None
    scalar_im: Optional[float] = None
    note: str = ""


class CheckRequest(BaseModel):
    pair: str = Field("zx", description="zx | zz | z2 | z3 | z4 | z2x2 | "
                                        "frel2 | spek | zxy")
    law: str = Field("all", description="frobenius | coherence | "
                                        "complementarity | "
                                        "strong-complementarity | exponent | "
                                        "sharpness | enough-points | max-two "
                                        "| all")
    k: Optional[int] = None
    tolerance: Optional[float] = None


class CheckResponse(BaseModel):
    subject: str
    passed: bool
    lines: list[LawLine]
    pretty: str


class GhzRequest(BaseModel):
    parties: int = 3
    angles_degrees: list[float] = Field(default_factory=lambda: [0.0, 0.0, 0.0])
    pair: str = "z2"


class GhzResponse(BaseModel):
    distribution: dict[str, float]
    parity: dict[str, float]
    phase_sum_class: str
    lhv_feasible: Optional[bool]
    lhv_satisfying: Optional[int]
    lhv_total: Optional[int]
    pretty: str


class SoundnessEntry(BaseModel):
    rule: str
    sound: bool
    max_deviation: float
    witness: Optional[dict] = None


class SoundnessRequest(BaseModel):
    theory: str = "boolcirc"
    model: str = "B"
    samples: int = 20


class SoundnessResponse(BaseModel):
    theory: str
    model: str
    all_sound: bool
    entries: list[SoundnessEntry]
    pretty: str
