"""omninav: keyword-tagged viewpoint graph memory for navigation agents.

The engine incrementally builds an omnigraph (viewpoints + connectivity +
per-viewpoint keyword detections) while an agent tours a scene, and fuses
local subgraphs into positional keyword context. Includes a tour simulator,
trajectory metrics, and a CLI.
"""

__version__ = "0.1.0"

from .config import EngineConfig
from .detection import (
    BoundingBox,
    Detection,
    MockDetector,
    Panorama,
    SceneObject,
    SceneView,
    absolute_heading,
    detect,
    filter_boxes_per_keyword,
    normalize_label,
    relative_heading_from_box,
)
from .fusion import (
    EmbeddingConfig,
    FusedKeyword,
    KeywordEmbedder,
    build_map_embedding,
    fuse_continuous,
    fuse_discrete,
    fuse_keyword_embedding,
    heading_embedding,
    keyword_attention,
    layer_norm,
)
from .graph import Omnigraph, Viewpoint, deserialize, serialize, update_keywords
from .keywords import (
    KeywordCache,
    KeywordSet,
    extract_keywords_rule_based,
    parse_llm_response,
    render_llm_prompt,
)
from .metrics import EpisodeResult, dtw, episode_metrics, ndtw, t_ndtw

__all__ = [
    "BoundingBox",
    "Detection",
    "EmbeddingConfig",
    "EngineConfig",
    "EpisodeResult",
    "FusedKeyword",
    "KeywordCache",
    "KeywordEmbedder",
    "KeywordSet",
    "MockDetector",
    "Omnigraph",
    "Panorama",
    "SceneObject",
    "SceneView",
    "Viewpoint",
    "absolute_heading",
    "build_map_embedding",
    "deserialize",
    "detect",
    "dtw",
    "episode_metrics",
    "extract_keywords_rule_based",
    "filter_boxes_per_keyword",
    "fuse_continuous",
    "fuse_discrete",
    "fuse_keyword_embedding",
    "heading_embedding",
    "keyword_attention",
    "layer_norm",
    "ndtw",
    "normalize_label",
    "parse_llm_response",
    "relative_heading_from_box",
    "render_llm_prompt",
    "serialize",
    "t_ndtw",
    "update_keywords",
]
