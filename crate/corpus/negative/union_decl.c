union u { int a; };
int main() { }
