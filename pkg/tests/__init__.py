# Tests del laboratorio nestfield
