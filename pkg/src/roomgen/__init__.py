"""roomgen: paired pseudo-scene synthesis from object point clouds.

Builds randomized rectangular rooms from single-object clouds (augment, place
on a centimeter height map, add floor/wall confounders, subsample to a fixed
budget), pairs rooms built from the same object set, and provides the
object-level contrastive loss with numeric oracles, a binary dataset
container, and a CLI.
"""

from .assembly import (
    RoomBuild,
    RoomScene,
    ScenePair,
    StatsReport,
    add_floor_wall,
    build_room,
    compute_shared_ids,
    generate_pair,
    sample_pair,
    sample_room,
    scene_augment,
    scene_stats,
    subsample,
)
from .augment import (
    ObjectAugmentConfig,
    augment_object,
    drop_points,
    jitter,
    resize_to_target,
    scale_to_max_extent,
)
from .config import RunConfig, load_config, parse_config_text
from .container import ContainerData, read_scene_container, write_scene_container
from .errors import (
    CorruptContainer,
    DegenerateFeature,
    DegenerateObject,
    DegeneratePair,
    DoesNotFit,
    FormatError,
    InvalidInput,
    MissingInstance,
    RoomGenError,
    TooFewPoints,
    WrongFormat,
)
from .geometry import (
    Aabb,
    compute_aabb,
    derive_seed,
    make_rng,
    rotate_z,
    sample_beta_half,
    translate,
)
from .layout import (
    Layout,
    Placement,
    RoomDims,
    SceneInstance,
    compute_room_dims,
    generate_layout,
    place_object,
    sort_by_area,
)
from .loss import (
    OclConfig,
    ProjectionHead,
    ToyEncoder,
    ocl_end_to_end,
    ocl_grad,
    ocl_loss,
    pair_features,
    pool_by_instance,
    project,
    toy_encode,
)
from .objio import ObjectCatalog, export_ply, load_catalog, read_object

__version__ = "0.1.0"
