"""Spatial mixup: directional-loudness augmentation for ambisonic SELD data."""

from .augment import AugmentConfig, CapDistribution, MixupPolicy, augment_clip, augment_dataset, sample_cap
from .dataset_io import AccdoaEvent, AccdoaFrameLabels, AmbisonicClip, read_audio, read_labels, write_audio, write_labels
from .metrics import SeldComponents, angular_distance, seld_error
from .sph import Direction, SphericalGrid, build_sh_matrix, eval_sh, rotate_first_order, sh_matrix, tdesign
from .transform import (
    DirectionalGains,
    DirectionalTransform,
    SphericalCap,
    apply_spatial_mixup,
    build_beamformer,
    build_transform,
    cap_gains,
    directivity_response,
    regular_mixup,
    transform_labels,
)

__version__ = "0.1.0"
