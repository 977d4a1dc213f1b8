int main() { double d; }
