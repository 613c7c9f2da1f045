//! Expected flow graphs for the fixture programs, written out box by box.
//!
//! Raw graphs carry language-qualified concrete types and
//! `language:package:function` labels. Semantic graphs carry ontology
//! concepts; blank boxes stand for unannotated code.

use semflow::diagram::{Block, BoxId, PortType, Source, Target, WiringDiagram};

fn py(t: &str) -> PortType {
    PortType::labeled(format!("python:{t}"))
}

fn r(t: &str) -> PortType {
    PortType::labeled(format!("r:{t}"))
}

fn c(t: &str) -> PortType {
    PortType::labeled(t)
}

fn concrete(d: &mut WiringDiagram, label: &str, name: &str, ins: Vec<PortType>, outs: Vec<PortType>) -> BoxId {
    d.add_box(Block::atomic(Some(label.into()), name, ins, outs))
}

fn concept(d: &mut WiringDiagram, label: &str, ins: Vec<PortType>, outs: Vec<PortType>) -> BoxId {
    d.add_box(Block::labeled(label, ins, outs))
}

fn blank(d: &mut WiringDiagram, ins: Vec<PortType>, outs: Vec<PortType>) -> BoxId {
    d.add_box(Block::unlabeled(ins, outs))
}

fn wire(d: &mut WiringDiagram, from: (Option<BoxId>, usize), to: (Option<BoxId>, usize)) {
    let s = match from {
        (Some(b), j) => Source::BoxOut(b, j),
        (None, k) => Source::OuterIn(k),
    };
    let t = match to {
        (Some(b), i) => Target::BoxIn(b, i),
        (None, k) => Target::OuterOut(k),
    };
    d.add_wire(s, t);
}

const IN: Option<BoxId> = None;
const OUT: Option<BoxId> = None;

/// NumPy/SciPy k-means: read, drop the label column, cluster.
pub fn raw_kmeans_scipy() -> WiringDiagram {
    let nd = || py("numpy.ndarray");
    let mut d = WiringDiagram::new(
        vec![py("str"), py("str"), py("str"), py("int"), py("int"), py("int"), py("int")],
        vec![nd(), nd()],
    );
    let read = concrete(&mut d, "python:numpy:genfromtxt", "genfromtxt", vec![py("str"), py("str"), py("str"), py("int")], vec![nd()]);
    let del = concrete(&mut d, "python:numpy:delete", "delete", vec![nd(), py("int"), py("int")], vec![nd()]);
    let km = concrete(&mut d, "python:scipy.cluster.vq:kmeans2", "kmeans2", vec![nd(), py("int")], vec![nd(), nd()]);
    for k in 0..4 {
        wire(&mut d, (IN, k), (Some(read), k));
    }
    wire(&mut d, (Some(read), 0), (Some(del), 0));
    wire(&mut d, (IN, 4), (Some(del), 1));
    wire(&mut d, (IN, 5), (Some(del), 2));
    wire(&mut d, (Some(del), 0), (Some(km), 0));
    wire(&mut d, (IN, 6), (Some(km), 1));
    wire(&mut d, (Some(km), 0), (OUT, 0));
    wire(&mut d, (Some(km), 1), (OUT, 1));
    d
}

/// Pandas/Scikit-learn k-means. `fit` mutates the estimator and returns it,
/// so it has one output that feeds both attribute reads.
pub fn raw_kmeans_sklearn() -> WiringDiagram {
    let df = || py("pandas.core.frame.DataFrame");
    let km = || py("sklearn.cluster.k_means_.KMeans");
    let nd = || py("numpy.ndarray");
    let parser = "_make_parser_function.<locals>.parser_f";
    let mut d = WiringDiagram::new(
        vec![py("str"), py("str"), py("int"), py("int"), py("NoneType")],
        vec![nd(), nd()],
    );
    let read = concrete(&mut d, &format!("python:pandas:{parser}"), parser, vec![py("str")], vec![df()]);
    let drop = concrete(&mut d, "python:pandas.core.generic:NDFrame.drop", "NDFrame.drop", vec![df(), py("str"), py("int")], vec![df()]);
    let new = concrete(&mut d, "python:sklearn.cluster.k_means_:KMeans", "KMeans", vec![py("int")], vec![km()]);
    let values = concrete(&mut d, "python:pandas.core.generic:NDFrame.values", "NDFrame.values", vec![df()], vec![nd()]);
    let fit = concrete(&mut d, "python:sklearn.cluster.k_means_:KMeans.fit", "KMeans.fit", vec![km(), nd(), py("NoneType")], vec![km()]);
    let centers = concrete(&mut d, "python:sklearn.cluster.k_means_:cluster_centers_", "cluster_centers_", vec![km()], vec![nd()]);
    let labels = concrete(&mut d, "python:sklearn.cluster.k_means_:labels_", "labels_", vec![km()], vec![nd()]);
    wire(&mut d, (IN, 0), (Some(read), 0));
    wire(&mut d, (Some(read), 0), (Some(drop), 0));
    wire(&mut d, (IN, 1), (Some(drop), 1));
    wire(&mut d, (IN, 2), (Some(drop), 2));
    wire(&mut d, (IN, 3), (Some(new), 0));
    wire(&mut d, (Some(drop), 0), (Some(values), 0));
    wire(&mut d, (Some(new), 0), (Some(fit), 0));
    wire(&mut d, (Some(values), 0), (Some(fit), 1));
    wire(&mut d, (IN, 4), (Some(fit), 2));
    wire(&mut d, (Some(fit), 0), (Some(centers), 0));
    wire(&mut d, (Some(fit), 0), (Some(labels), 0));
    wire(&mut d, (Some(centers), 0), (OUT, 0));
    wire(&mut d, (Some(labels), 0), (OUT, 1));
    d
}

/// Base R k-means: the label column is dropped by name comparison and
/// logical indexing.
pub fn raw_kmeans_r() -> WiringDiagram {
    let df = || r("data.frame");
    let mut d = WiringDiagram::new(
        vec![r("character"), r("logical"), r("character"), r("numeric")],
        vec![r("matrix"), r("integer")],
    );
    let read = concrete(&mut d, "r:utils:read.csv", "read.csv", vec![r("character"), r("logical")], vec![df()]);
    let names = concrete(&mut d, "r:base:names", "names", vec![df()], vec![r("character")]);
    let ne = concrete(&mut d, "r:base:ne", "ne", vec![r("character"), r("character")], vec![r("logical")]);
    let index = concrete(&mut d, "r:base:getitem", "getitem", vec![df(), r("logical")], vec![df()]);
    let km = concrete(&mut d, "r:stats:kmeans", "kmeans", vec![df(), r("numeric")], vec![r("kmeans")]);
    let centers = concrete(&mut d, "r:base:centers", "centers", vec![r("kmeans")], vec![r("matrix")]);
    let cluster = concrete(&mut d, "r:base:cluster", "cluster", vec![r("kmeans")], vec![r("integer")]);
    wire(&mut d, (IN, 0), (Some(read), 0));
    wire(&mut d, (IN, 1), (Some(read), 1));
    wire(&mut d, (Some(read), 0), (Some(names), 0));
    wire(&mut d, (Some(read), 0), (Some(index), 0));
    wire(&mut d, (Some(names), 0), (Some(ne), 0));
    wire(&mut d, (IN, 2), (Some(ne), 1));
    wire(&mut d, (Some(ne), 0), (Some(index), 1));
    wire(&mut d, (Some(index), 0), (Some(km), 0));
    wire(&mut d, (IN, 3), (Some(km), 1));
    wire(&mut d, (Some(km), 0), (Some(centers), 0));
    wire(&mut d, (Some(km), 0), (Some(cluster), 0));
    wire(&mut d, (Some(centers), 0), (OUT, 0));
    wire(&mut d, (Some(cluster), 0), (OUT, 1));
    d
}

/// Pandas/Scikit-learn linear regression scored by mean squared error.
pub fn raw_regression() -> WiringDiagram {
    let df = || py("pandas.core.frame.DataFrame");
    let series = || py("pandas.core.series.Series");
    let lr = || py("sklearn.linear_model.base.LinearRegression");
    let parser = "_make_parser_function.<locals>.parser_f";
    let mut d = WiringDiagram::new(vec![py("str"), py("str"), py("int"), py("str")], vec![py("float")]);
    let read = concrete(&mut d, &format!("python:pandas:{parser}"), parser, vec![py("str")], vec![df()]);
    let drop = concrete(&mut d, "python:pandas.core.generic:NDFrame.drop", "NDFrame.drop", vec![df(), py("str"), py("int")], vec![df()]);
    let get = concrete(&mut d, "python:operator:getitem", "getitem", vec![df(), py("str")], vec![series()]);
    let new = concrete(&mut d, "python:sklearn.linear_model.base:LinearRegression", "LinearRegression", vec![], vec![lr()]);
    let fit = concrete(&mut d, "python:sklearn.linear_model.base:LinearRegression.fit", "LinearRegression.fit", vec![lr(), df(), series()], vec![lr()]);
    let predict = concrete(&mut d, "python:sklearn.linear_model.base:LinearModel.predict", "LinearModel.predict", vec![lr(), df()], vec![py("numpy.ndarray")]);
    let mse = concrete(&mut d, "python:sklearn.metrics:mean_squared_error", "mean_squared_error", vec![series(), py("numpy.ndarray")], vec![py("float")]);
    wire(&mut d, (IN, 0), (Some(read), 0));
    wire(&mut d, (Some(read), 0), (Some(drop), 0));
    wire(&mut d, (IN, 1), (Some(drop), 1));
    wire(&mut d, (IN, 2), (Some(drop), 2));
    wire(&mut d, (Some(read), 0), (Some(get), 0));
    wire(&mut d, (IN, 3), (Some(get), 1));
    wire(&mut d, (Some(new), 0), (Some(fit), 0));
    wire(&mut d, (Some(drop), 0), (Some(fit), 1));
    wire(&mut d, (Some(get), 0), (Some(fit), 2));
    wire(&mut d, (Some(fit), 0), (Some(predict), 0));
    wire(&mut d, (Some(drop), 0), (Some(predict), 1));
    wire(&mut d, (Some(get), 0), (Some(mse), 0));
    wire(&mut d, (Some(predict), 0), (Some(mse), 1));
    wire(&mut d, (Some(mse), 0), (OUT, 0));
    d
}

/// The semantic flow graph shared by all three k-means programs: read a
/// table, pass it through unannotated preprocessing, fit k-means, read off
/// centroids and cluster assignments.
pub fn semantic_kmeans() -> WiringDiagram {
    let mut d = WiringDiagram::new(vec![c("string"), c("integer")], vec![c("array"), c("vector")]);
    let file = concept(&mut d, "tabular-file", vec![c("string")], vec![c("tabular-file")]);
    let read = concept(&mut d, "read-tabular-file", vec![c("tabular-file")], vec![c("table")]);
    let prep = blank(&mut d, vec![c("table")], vec![c("table")]);
    let km = concept(&mut d, "k-means", vec![c("integer")], vec![c("k-means")]);
    let fit = concept(&mut d, "fit", vec![c("model"), c("data")], vec![c("model")]);
    let centroids = concept(&mut d, "k-means-centroids", vec![c("model")], vec![c("array")]);
    let clusters = concept(&mut d, "clustering-model-clusters", vec![c("model")], vec![c("vector")]);
    wire(&mut d, (IN, 0), (Some(file), 0));
    wire(&mut d, (Some(file), 0), (Some(read), 0));
    wire(&mut d, (Some(read), 0), (Some(prep), 0));
    wire(&mut d, (IN, 1), (Some(km), 0));
    wire(&mut d, (Some(km), 0), (Some(fit), 0));
    wire(&mut d, (Some(prep), 0), (Some(fit), 1));
    wire(&mut d, (Some(fit), 0), (Some(centroids), 0));
    wire(&mut d, (Some(fit), 0), (Some(clusters), 0));
    wire(&mut d, (Some(centroids), 0), (OUT, 0));
    wire(&mut d, (Some(clusters), 0), (OUT, 1));
    d
}

/// The regression program in ontology terms. The feature table and the
/// response column each come out of their own blank box.
pub fn semantic_regression() -> WiringDiagram {
    let mut d = WiringDiagram::new(
        vec![c("string"), c("string"), c("integer"), c("string")],
        vec![c("real")],
    );
    let file = concept(&mut d, "tabular-file", vec![c("string")], vec![c("tabular-file")]);
    let read = concept(&mut d, "read-tabular-file", vec![c("tabular-file")], vec![c("table")]);
    let features = blank(&mut d, vec![c("string"), c("integer"), c("table")], vec![c("table")]);
    let response = blank(&mut d, vec![c("string"), c("table")], vec![c("column")]);
    let lr = concept(&mut d, "linear-regression", vec![], vec![c("linear-regression")]);
    let fit = concept(&mut d, "fit-supervised", vec![c("model"), c("data"), c("data")], vec![c("model")]);
    let predict = concept(&mut d, "predict", vec![c("model"), c("data")], vec![c("data")]);
    let mse = concept(&mut d, "mean-squared-error", vec![c("data"), c("data")], vec![c("real")]);
    wire(&mut d, (IN, 0), (Some(file), 0));
    wire(&mut d, (Some(file), 0), (Some(read), 0));
    wire(&mut d, (IN, 1), (Some(features), 0));
    wire(&mut d, (IN, 2), (Some(features), 1));
    wire(&mut d, (Some(read), 0), (Some(features), 2));
    wire(&mut d, (IN, 3), (Some(response), 0));
    wire(&mut d, (Some(read), 0), (Some(response), 1));
    wire(&mut d, (Some(lr), 0), (Some(fit), 0));
    wire(&mut d, (Some(features), 0), (Some(fit), 1));
    wire(&mut d, (Some(response), 0), (Some(fit), 2));
    wire(&mut d, (Some(fit), 0), (Some(predict), 0));
    wire(&mut d, (Some(features), 0), (Some(predict), 1));
    wire(&mut d, (Some(response), 0), (Some(mse), 0));
    wire(&mut d, (Some(predict), 0), (Some(mse), 1));
    wire(&mut d, (Some(mse), 0), (OUT, 0));
    d
}

/// Trace fixture stem paired with its expected raw graph.
pub fn raw_figures() -> Vec<(&'static str, WiringDiagram)> {
    vec![
        ("kmeans-scipy", raw_kmeans_scipy()),
        ("kmeans-sklearn", raw_kmeans_sklearn()),
        ("kmeans-r", raw_kmeans_r()),
        ("regression-sklearn", raw_regression()),
    ]
}

/// Every expected graph under the file name used in `fixtures/expected`.
pub fn all() -> Vec<(String, WiringDiagram)> {
    let mut out: Vec<(String, WiringDiagram)> =
        raw_figures().into_iter().map(|(n, d)| (format!("{n}.raw"), d)).collect();
    out.push(("kmeans.semantic".into(), semantic_kmeans()));
    out.push(("regression-sklearn.semantic".into(), semantic_regression()));
    out
}
