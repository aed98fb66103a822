"""Model configuration."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class ModelConfig:
    """Shape parameters of the toy decoder-only transformer."""

    n_layers: int
    d_model: int
    n_heads: int
    d_ff: int
    vocab_size: int
    max_seq_len: int
    eos_token_id: int

    def __post_init__(self):
        for field in ("n_layers", "d_model", "n_heads", "d_ff", "vocab_size", "max_seq_len"):
            value = getattr(self, field)
            if not isinstance(value, int) or value <= 0:
                raise ValidationError(f"{field} must be a positive integer, got {value!r}")
        if self.d_model % self.n_heads != 0:
            raise ValidationError(
                f"d_model={self.d_model} is not divisible by n_heads={self.n_heads}"
            )
        if not 0 <= self.eos_token_id < self.vocab_size:
            raise ValidationError(
                f"eos_token_id={self.eos_token_id} outside [0, {self.vocab_size})"
            )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        try:
            return cls(**{f: int(data[f]) for f in (
                "n_layers", "d_model", "n_heads", "d_ff",
                "vocab_size", "max_seq_len", "eos_token_id",
            )})
        except KeyError as exc:
            raise ValidationError(f"config is missing field {exc.args[0]!r}") from exc
