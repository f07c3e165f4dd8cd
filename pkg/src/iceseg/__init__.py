"""Sea-ice segmentation toolkit.

Auto-labels optical satellite tiles into thick ice, thin ice, and open
water with HSV color thresholds, filters thin clouds and shadows, trains
a from-scratch U-Net on the auto-labeled tiles, and evaluates with pixel
accuracy, column-normalized confusion matrices, and SSIM.
"""

__version__ = "0.1.0"
