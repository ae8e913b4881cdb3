"""Figure rendering for run reports (files only, no interactive display)."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

REPORT_RC = {
    "font.size": 8,
    "axes.titlesize": 8,
    "axes.labelsize": 8,
    "xtick.labelsize": 7,
    "ytick.labelsize": 7,
    "figure.dpi": 150,
    "savefig.bbox": "tight",
}


def _depth_panel(ax, values, title, vmin, vmax, cmap="viridis"):
    im = ax.imshow(values, cmap=cmap, vmin=vmin, vmax=vmax, interpolation="nearest")
    ax.set_title(title)
    ax.set_xticks([])
    ax.set_yticks([])
    return im


def depth_report_figure(estimate, truth=None, range_column=None, delta_r=None):
    """
    Build the report figure: estimated depth, ground truth and absolute
    error side by side, plus one beam's range profile when given.
    """
    panels = 1 + (truth is not None) * 2 + (range_column is not None)
    with plt.rc_context(REPORT_RC):
        fig, axes = plt.subplots(1, panels, figsize=(3.2 * panels, 2.8), squeeze=False, layout="constrained")
        axes = list(axes[0])
        est = estimate.values
        vmax = float(max(est.max(), truth.values.max() if truth is not None else 0.0))
        im = _depth_panel(axes.pop(0), est, "estimated depth [m]", 0.0, vmax)
        fig.colorbar(im, ax=fig.axes[0])
        if truth is not None:
            ax = axes.pop(0)
            im = _depth_panel(ax, truth.values, "ground truth [m]", 0.0, vmax)
            fig.colorbar(im, ax=ax)
            ax = axes.pop(0)
            err = np.abs(est - truth.values)
            im = _depth_panel(ax, err, "|error| [m]", 0.0, float(err.max()) or 1.0, cmap="magma")
            fig.colorbar(im, ax=ax)
        if range_column is not None:
            ax = axes.pop(0)
            mag = 20 * np.log10(np.abs(range_column) + 1e-30)
            x = np.arange(len(mag)) * (delta_r if delta_r else 1.0)
            ax.plot(x, mag, lw=0.8)
            ax.set_xlabel("one-way range [m]" if delta_r else "bin")
            ax.set_ylabel("|Z_RP| [dB]")
            ax.set_title("range profile (strongest beam)")
            ax.grid(True, lw=0.3)
    return fig


def save_depth_report(path, estimate, truth=None, range_column=None, delta_r=None):
    fig = depth_report_figure(estimate, truth, range_column, delta_r)
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)
