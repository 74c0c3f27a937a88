use std::path::{Path, PathBuf};

use mibound::figures::{build_figure, write_csv, write_svg, FigureId, FigureSpec};
use mibound::Error;

/// ε values of the headline table.
pub const HEADLINE_EPS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

/// Writes `<id>.csv` and `<id>.svg` for every figure and `headline.csv`, the
/// p = 0.5 bound comparison at [`HEADLINE_EPS`], into `out_dir`.
///
/// Returns the written files in a fixed order. Output depends only on the
/// library version, so two runs produce identical bytes.
pub fn reproduce_all(out_dir: impl AsRef<Path>) -> mibound::Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    for id in FigureId::ALL {
        let series = build_figure(&FigureSpec::new(id))?;
        let written = write_csv(&series, dir.join(format!("{id}.csv")))?;
        files.extend(written.paths().into_iter().map(Path::to_path_buf));
        let svg = dir.join(format!("{id}.svg"));
        write_svg(&series, &svg, id.title())?;
        files.push(svg);
        log::info!("wrote {id}");
    }
    let headline = build_figure(&FigureSpec::new(FigureId::MiBounds).with_grid(HEADLINE_EPS.to_vec()))?;
    let path = dir.join("headline.csv");
    write_csv(&headline, &path)?;
    files.push(path);
    Ok(files)
}
