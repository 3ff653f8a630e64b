# Configuración del sistema