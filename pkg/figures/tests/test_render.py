import pytest

from rivernet_figures import EmptyInput, FigureSpec, MissingColumn, render
from rivernet_figures.render import THRESHOLD_GID

LINES_CSV = """# generated test
preset,L,R0,lambda_star,n_unknowns,iterations,status
1,400,0.93,-1e-07,81,12,ok
1,800,1.39,5e-07,161,12,ok
3-a,400,0.52,-8e-07,84,14,ok
3-a,800,0.83,-2e-07,164,14,ok
"""

GRID_CSV_HEADER = "Q2,B2,R0,lambda_star,n_unknowns,iterations,status\n"

STEADY_CSV = """# generated test
edge_id,x_m,u
0,0,0.11
0,50,0.14
0,100,0.2
1,0,0.31
1,50,0.38
1,100,0.2
"""


def _grid_csv(values):
    rows = [GRID_CSV_HEADER]
    for i, q in enumerate((0.01, 0.05, 0.09)):
        for j, b in enumerate((5.0, 15.0, 25.0)):
            rows.append(f"{q},{b},{values[i][j]},0,100,10,ok\n")
    return "# generated test\n" + "".join(rows)


def _spec(tmp_path, csv_text, **kw):
    csv = tmp_path / "input.csv"
    csv.write_text(csv_text)
    doc = {"input": "input.csv", "out": "figure", **kw}
    return FigureSpec.from_document(doc, base_dir=tmp_path)


def test_lines_renders_svg_and_png(tmp_path):
    spec = _spec(tmp_path, LINES_CSV, kind="lines", x="L", y="R0",
                 group="preset", title="curves")
    files = render(spec)
    assert [f.suffix for f in files] == [".svg", ".png"]
    assert all(f.exists() and f.stat().st_size > 0 for f in files)


def test_lines_missing_column(tmp_path):
    spec = _spec(tmp_path, LINES_CSV, kind="lines", x="length", y="R0")
    with pytest.raises(MissingColumn):
        render(spec)


def test_contour_threshold_level_emphasized(tmp_path):
    straddling = [[1.9, 1.5, 1.2], [1.4, 1.0, 0.8], [0.9, 0.7, 0.5]]
    spec = _spec(tmp_path, _grid_csv(straddling), kind="contour",
                 axes=["Q2", "B2"], value="R0", levels=[0.75, 1.25])
    svg, _ = render(spec)
    assert THRESHOLD_GID in svg.read_text()

    all_above = [[1.9, 1.8, 1.7], [1.6, 1.5, 1.4], [1.3, 1.25, 1.2]]
    spec2 = _spec(tmp_path, _grid_csv(all_above), kind="contour",
                  axes=["Q2", "B2"], value="R0")
    svg2, _ = render(spec2)
    assert THRESHOLD_GID not in svg2.read_text()


def test_contour_single_row_is_empty_input(tmp_path):
    text = "# c\nQ2,B2,R0\n0.01,5.0,1.2\n"
    spec = _spec(tmp_path, text, kind="contour", axes=["Q2", "B2"], value="R0")
    with pytest.raises(EmptyInput):
        render(spec)


def test_contour_incomplete_grid_rejected(tmp_path):
    text = ("# c\nQ2,B2,R0\n0.01,5.0,1.2\n0.01,15.0,1.1\n0.05,5.0,0.9\n"
            "0.05,15.0,0.8\n0.09,5.0,0.7\n")
    spec = _spec(tmp_path, text, kind="contour", axes=["Q2", "B2"], value="R0")
    with pytest.raises(EmptyInput):
        render(spec)


def test_contour_requires_two_axes(tmp_path):
    with pytest.raises(ValueError):
        FigureSpec.from_document(
            {"kind": "contour", "input": "x.csv", "out": "y", "axes": ["Q2"]},
            base_dir=tmp_path)


def test_edge_profiles_panels(tmp_path):
    spec = _spec(tmp_path, STEADY_CSV, kind="edge-profiles")
    svg, png = render(spec)
    body = svg.read_text()
    assert "edge 0" in body and "edge 1" in body


def test_edge_profiles_extinct_table_is_missing_column(tmp_path):
    text = "# c\nstatus,R0,lambda_star\nextinct,0.93,-7e-07\n"
    spec = _spec(tmp_path, text, kind="edge-profiles")
    with pytest.raises(MissingColumn):
        render(spec)


def test_empty_csv(tmp_path):
    spec = _spec(tmp_path, "# only a comment\na,b\n", kind="lines", x="a", y="b")
    with pytest.raises(EmptyInput):
        render(spec)


def test_rendering_is_deterministic(tmp_path):
    spec = _spec(tmp_path, LINES_CSV, kind="lines", x="L", y="R0",
                 group="preset")
    first = render(spec)[0].read_bytes()
    second = render(spec)[0].read_bytes()
    assert first == second


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(ValueError):
        FigureSpec.from_document({"kind": "pie", "input": "a.csv", "out": "b"},
                                 base_dir=tmp_path)
