use serde_json::{json, Value};
use somkit::annotations::{parse_annotation_file, Segmentation};
use somkit::{Error, ErrorClass};

/// Three images, five annotations: polygons, uncompressed and compressed RLE.
fn fixture() -> Value {
    json!({
        "images": [
            {"id": 1, "file_name": "a.jpg", "width": 10, "height": 8},
            {"id": 2, "file_name": "b.jpg", "width": 4, "height": 3},
            {"id": 3, "file_name": "c.jpg", "width": 4, "height": 4}
        ],
        "categories": [{"id": 1, "name": "Person"}, {"id": 2, "name": "dog"}],
        "annotations": [
            {"id": 1, "image_id": 1, "category_id": 1, "segmentation": [[1, 1, 5, 1, 5, 5, 1, 5]],
             "bbox": [1, 1, 4, 4], "area": 16, "iscrowd": 0},
            {"id": 2, "image_id": 1, "category_id": 2, "segmentation": [[6, 0, 9, 0, 9, 2, 6, 2], [6, 4, 8, 4, 8, 6]],
             "bbox": [6, 0, 3, 6], "area": 8, "iscrowd": 0},
            {"id": 3, "image_id": 2, "category_id": 2, "segmentation": {"size": [3, 4], "counts": [3, 3, 6]},
             "bbox": [1, 0, 1, 3], "area": 3, "iscrowd": 0},
            {"id": 4, "image_id": 3, "category_id": 1, "segmentation": {"size": [4, 4], "counts": "52203"},
             "bbox": [1, 1, 2, 2], "area": 4, "iscrowd": 1},
            {"id": 5, "image_id": 3, "category_id": 2, "segmentation": [[0, 0, 2, 0, 2, 2, 0, 2]],
             "bbox": [0, 0, 2, 2], "area": 4, "iscrowd": 0}
        ]
    })
}

fn parse(v: &Value) -> somkit::Result<somkit::annotations::AnnotationSet> {
    parse_annotation_file(&serde_json::to_vec(v).unwrap())
}

#[test]
fn fixture_parses_with_expected_masks() {
    let set = parse(&fixture()).unwrap();
    assert_eq!((set.images.len(), set.annotations.len()), (3, 5));
    assert_eq!(set.category(1).unwrap().name, "person");
    let img1 = set.image(1).unwrap();
    assert_eq!(set.annotation(1).unwrap().to_mask(img1).unwrap().area(), 16);
    // two polygons: a 3x2 rectangle and a triangle covering 3 pixel centres
    let m2 = set.annotation(2).unwrap().to_mask(img1).unwrap();
    assert_eq!(m2.area(), 6 + 3);
    // column-major runs [3, 3, 6] on 3x4: column 1 is fully set
    let m3 = set.annotation(3).unwrap().to_mask(set.image(2).unwrap()).unwrap();
    assert!((0..3).all(|y| m3.get(1, y)) && m3.area() == 3);
    // "52203" = [5, 2, 2, 2, 5]: the centre 2x2 block of a 4x4 grid
    match &set.annotation(4).unwrap().segmentation {
        Segmentation::Rle { counts, .. } => assert_eq!(counts, &[5, 2, 2, 2, 5]),
        other => panic!("expected RLE, got {other:?}"),
    }
    assert_eq!(set.annotations_for(3).count(), 2);
}

fn with(f: impl FnOnce(&mut Value)) -> somkit::Result<somkit::annotations::AnnotationSet> {
    let mut v = fixture();
    f(&mut v);
    parse(&v)
}

#[test]
fn validation_errors() {
    let e = with(|v| v["annotations"][2]["image_id"] = json!(9)).unwrap_err();
    assert!(matches!(e, Error::Referential { annotation_id: 3, .. }), "{e}");
    let e = with(|v| v["annotations"][0]["segmentation"] = json!([[1, 1, 5, 1, 5]])).unwrap_err();
    assert_eq!(e.class(), ErrorClass::Data);
    let e = with(|v| v["annotations"][2]["segmentation"]["size"] = json!([4, 3])).unwrap_err();
    assert_eq!(e.class(), ErrorClass::Data);
    let e = with(|v| v["annotations"][0]["bbox"] = json!([8, 1, 4, 4])).unwrap_err();
    assert_eq!(e.class(), ErrorClass::Data);
    assert!(with(|v| v["annotations"][1]["id"] = json!(1)).is_err());
    assert!(with(|v| v["images"][0]["width"] = json!(0)).is_err());
    assert!(with(|v| v["annotations"][0]["area"] = json!(0)).is_err());
    // runs that do not cover the grid exactly
    assert!(with(|v| v["annotations"][3]["segmentation"]["counts"] = json!("5220")).is_err());
    assert!(with(|v| v["annotations"][2]["segmentation"]["counts"] = json!([3, 3, 5])).is_err());
}

#[test]
fn malformed_json_reports_an_offset() {
    let err = parse_annotation_file(b"{\n  \"images\": [}").unwrap_err();
    match err {
        Error::Json { offset, .. } => assert!(offset > 0 && offset <= 16),
        other => panic!("{other}"),
    }
}
