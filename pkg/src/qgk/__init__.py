"""Context-bound LSB image steganography gated by a deterministic circuit key.

Payload recovery requires four jointly correct factors: a password, a shared
secret, a context string, and the 32-byte signature of the original cover
image.  The keystream seeded by those factors drives both traversal orders
and a small variational circuit whose exact output distribution keys the
payload-region permutation.  Any wrong factor collapses to one opaque
failure value.
"""

__version__ = "1.0.0"

from .analysis import (
    DistributionReport,
    ImageQualityReport,
    cross_entropy,
    distribution_report,
    image_quality,
    linear_xeb,
    shannon_entropy,
    total_variation_distance,
)
from .context import (
    RecoveryState,
    SeedBundle,
    compute_image_signature,
    derive_master_seed,
    expand_seeds,
    signature_from_hex,
    signature_to_hex,
)
from .crypto import (
    DEFAULT_ITERATIONS,
    PayloadType,
    ProtectedPayload,
    decrypt_payload,
    derive_encryption_key,
    encrypt_payload,
    strengthen_password,
)
from .errors import (
    CapacityError,
    FormatError,
    ParameterError,
    QgkError,
    StageFailure,
)
from .keystream import KeyStream
from .payload import SecretInput, load_secret_image, normalize, restore
from .pipeline import ABLATION_MODES, PipelineConfig, Recovered, decode, encode
from .quantum import (
    BornDistribution,
    CircuitSpec,
    NoiseParams,
    ShotCounts,
    derive_gate_key,
    derive_parameters,
    encode_distribution,
    evaluate_statevector,
    sample_shots,
)
from .stego import (
    HeaderContainer,
    StegoLayout,
    build_layout,
    capacity,
    embed_bits,
    extract_bits,
    keyed_permutation,
    load_png,
    save_png,
)

__all__ = [
    "__version__",
    "ABLATION_MODES",
    "BornDistribution",
    "CapacityError",
    "CircuitSpec",
    "DEFAULT_ITERATIONS",
    "DistributionReport",
    "FormatError",
    "HeaderContainer",
    "ImageQualityReport",
    "KeyStream",
    "NoiseParams",
    "ParameterError",
    "PayloadType",
    "PipelineConfig",
    "ProtectedPayload",
    "QgkError",
    "Recovered",
    "RecoveryState",
    "SecretInput",
    "SeedBundle",
    "ShotCounts",
    "StageFailure",
    "StegoLayout",
    "build_layout",
    "capacity",
    "compute_image_signature",
    "cross_entropy",
    "decode",
    "decrypt_payload",
    "derive_encryption_key",
    "derive_gate_key",
    "derive_master_seed",
    "derive_parameters",
    "distribution_report",
    "embed_bits",
    "encode",
    "encode_distribution",
    "encrypt_payload",
    "evaluate_statevector",
    "expand_seeds",
    "extract_bits",
    "image_quality",
    "keyed_permutation",
    "linear_xeb",
    "load_png",
    "load_secret_image",
    "normalize",
    "restore",
    "sample_shots",
    "save_png",
    "shannon_entropy",
    "signature_from_hex",
    "signature_to_hex",
    "strengthen_password",
    "total_variation_distance",
]
