"""Full-reference super-resolution evaluation toolkit.

Six IQA metrics (PSNR, SSIM, GMSD, FSIM, VIF, SR-SIM), an arbitrary-scale
bicubic degradation pipeline, a hybrid pixel-gradient loss, GLCM texture
diagnostics, and Borda-count rank aggregation — as a library plus the
``sreval`` command-line harness.
"""

from .imagecore import (PlanarImage, crop_border, extract_luma, from_gray,
                        from_rgb, load_image, rgb_to_ycbcr, save_image,
                        ycbcr_to_rgb)
from .lossmeter import (GradientField, HybridLossConfig, derivative_map,
                        grad_loss, gradient_field, hybrid_loss, l1_loss)
from .metrics import (METRICS, MetricId, MetricResult, evaluate_pair, fsim,
                      gmsd, psnr, srsim, ssim, vif)
from .ranking import (ScoreRecord, best_model_table, borda_aggregate,
                      delta_analysis, final_rank, psnr_gain, read_scores,
                      value_ranks, write_scores)
from .resample import (PatchSpec, ScaleSampler, augment, bicubic_resize,
                       cubic_kernel, degrade_corpus, make_lr_hr_pair)
from .texture import GlcmConfig, GlcmStats, edge_corner_map, glcm, glcm_stats

__version__ = "0.1.0"

__all__ = [
    "PlanarImage", "load_image", "save_image", "rgb_to_ycbcr", "ycbcr_to_rgb",
    "extract_luma", "crop_border", "from_gray", "from_rgb",
    "bicubic_resize", "augment", "make_lr_hr_pair", "degrade_corpus",
    "cubic_kernel", "PatchSpec", "ScaleSampler",
    "psnr", "ssim", "gmsd", "fsim", "vif", "srsim", "evaluate_pair",
    "MetricId", "MetricResult", "METRICS",
    "l1_loss", "grad_loss", "hybrid_loss", "gradient_field", "derivative_map",
    "HybridLossConfig", "GradientField",
    "glcm", "glcm_stats", "edge_corner_map", "GlcmConfig", "GlcmStats",
    "ScoreRecord", "value_ranks", "borda_aggregate", "final_rank",
    "best_model_table", "psnr_gain", "delta_analysis", "read_scores",
    "write_scores",
    "__version__",
]
