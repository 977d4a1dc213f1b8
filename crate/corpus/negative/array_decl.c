int main() { int a[4]; }
