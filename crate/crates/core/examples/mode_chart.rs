//! Mode chart: the lowest seven modes over the (r, R) plane, as CSV.

use torospec::io::{write_table, Format, TableRow};
use torospec::{mode_chart, SpectralModel, SPEED_OF_LIGHT};

fn main() -> torospec::Result<()> {
    let minor = [0.007, 0.009];
    let major: Vec<f64> = (0..=12).map(|i| 0.007 + 0.0025 * i as f64).collect();
    let chart = mode_chart(
        &minor,
        &major,
        &SpectralModel::TorusPerturbative,
        None,
        7,
        SPEED_OF_LIGHT,
    )?;

    eprintln!(
        "{} rows, {} forbidden (r > R) points skipped",
        chart.rows.len(),
        chart.forbidden.len()
    );
    let rows: Vec<TableRow> = chart.rows.iter().map(TableRow::from_chart).collect();
    write_table(
        Format::Csv,
        "chart",
        serde_json::Value::Null,
        &rows,
        std::io::stdout().lock(),
    )
}
