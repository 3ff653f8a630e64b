# Utilidades: modelos de datos, errores y logging
