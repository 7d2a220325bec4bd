"""Namespace IRIs used across the knowledge base."""

AIDA = "https://aidentifyage.github.io/ontology/AIdentifyAGE#"

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"
DC = "http://purl.org/dc/terms/"
FOAF = "http://xmlns.com/foaf/0.1/"
MLS = "http://www.w3.org/ns/mls#"
OBO = "http://purl.obolibrary.org/obo/"
SNOMED = "http://snomed.info/id/"

RDF_TYPE = RDF + "type"
RDFS_SUBCLASSOF = RDFS + "subClassOf"
RDFS_SUBPROPERTYOF = RDFS + "subPropertyOf"
RDFS_DOMAIN = RDFS + "domain"
RDFS_RANGE = RDFS + "range"
RDFS_LABEL = RDFS + "label"
RDFS_COMMENT = RDFS + "comment"

OWL_CLASS = OWL + "Class"
OWL_OBJECT_PROPERTY = OWL + "ObjectProperty"
OWL_DATATYPE_PROPERTY = OWL + "DatatypeProperty"
OWL_ANNOTATION_PROPERTY = OWL + "AnnotationProperty"
OWL_EQUIVALENT_CLASS = OWL + "equivalentClass"
OWL_ONTOLOGY = OWL + "Ontology"

XSD_STRING = XSD + "string"
XSD_BOOLEAN = XSD + "boolean"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"
XSD_DATE = XSD + "date"
XSD_DATETIME = XSD + "dateTime"
RDF_LANGSTRING = RDF + "langString"

DC_TITLE = DC + "title"
DC_DESCRIPTION = DC + "description"

#: Prefix map shipped with every graph the system writes.
DEFAULT_PREFIXES = {
    "aida": AIDA,
    "rdf": RDF,
    "rdfs": RDFS,
    "owl": OWL,
    "xsd": XSD,
    "dc": DC,
    "foaf": FOAF,
    "mls": MLS,
    "obo": OBO,
    "snomed": SNOMED,
}
